"""Electro-optic phase-shifter response and segmented ring geometry.

The phase-shifter table holds the measured/simulated depletion response of
the active waveguide: effective-index change and propagation loss versus
reverse voltage. Reverse bias widens the depletion region, which removes
free carriers, raises the effective index (resonance red-shift convention)
and lowers the loss. ``round_trip`` turns a per-segment drive state into
the ring's round-trip phase and amplitude transmission.

All types are immutable after construction and every operation is a pure
function, so they are safe to share across parallel sweep workers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import VoltageRangeError

TWO_PI = 2.0 * math.pi
NM_PER_UM = 1.0e3
NM_PER_CM = 1.0e7


@dataclass(frozen=True)
class ElectroOpticResponse:
    """Tabulated (v_reverse, delta_n_eff, alpha) response of the doped waveguide.

    rows are (volts, index change, dB/cm) sorted by strictly ascending
    voltage, anchored at (0, 0, alpha0). ``lambda_ref_nm`` is the wavelength
    at which the table was extracted. Interpolation between nodes is
    monotone piecewise-linear, which preserves the table's monotonicity
    invariants by construction.
    """

    rows: tuple
    lambda_ref_nm: float

    def __post_init__(self):
        rows = tuple((float(v), float(dn), float(al)) for v, dn, al in self.rows)
        object.__setattr__(self, "rows", rows)
        if len(rows) < 2:
            raise ValueError("response table needs at least two rows")
        v = np.array([r[0] for r in rows])
        dn = np.array([r[1] for r in rows])
        al = np.array([r[2] for r in rows])
        if v[0] != 0.0 or dn[0] != 0.0:
            raise ValueError("first table row must be (v=0, delta_n_eff=0)")
        if np.any(np.diff(v) <= 0):
            raise ValueError("v_reverse must be strictly ascending")
        if np.any(np.diff(dn) < 0):
            raise ValueError("delta_n_eff must be non-decreasing in voltage")
        # zero loss is allowed so a lossless ring can be expressed for ablation
        if np.any(al < 0):
            raise ValueError("alpha must be non-negative everywhere")
        if np.any(np.diff(al) > 0):
            raise ValueError("alpha must be non-increasing in voltage")
        if not self.lambda_ref_nm > 0:
            raise ValueError("lambda_ref_nm must be positive")
        object.__setattr__(self, "_v", v)
        object.__setattr__(self, "_dn", dn)
        object.__setattr__(self, "_alpha", al)

    @property
    def v_min(self) -> float:
        return float(self._v[0])

    @property
    def v_max(self) -> float:
        return float(self._v[-1])

    def frozen_loss(self) -> "ElectroOpticResponse":
        """Copy of the table with loss pinned at its 0 V value (ablation aid)."""
        a0 = self.rows[0][2]
        return ElectroOpticResponse(
            rows=tuple((v, dn, a0) for v, dn, _ in self.rows),
            lambda_ref_nm=self.lambda_ref_nm,
        )


def interpolate_response(resp: ElectroOpticResponse, v):
    """Piecewise-linear (delta_n_eff, alpha) at voltage(s) ``v``.

    Exact at table nodes. Raises VoltageRangeError outside the table.
    """
    varr = np.asarray(v, dtype=float)
    ok = (varr >= resp.v_min) & (varr <= resp.v_max)
    if not np.all(ok):
        first = float(np.atleast_1d(varr[~ok])[0])
        raise VoltageRangeError(
            f"voltage {first:g} V outside table range "
            f"[{resp.v_min:g}, {resp.v_max:g}] V"
        )
    dn = np.interp(varr, resp._v, resp._dn)
    al = np.interp(varr, resp._v, resp._alpha)
    if varr.ndim == 0:
        return float(dn), float(al)
    return dn, al


@dataclass(frozen=True)
class RingConfig:
    """Ring geometry, segment layout and passive optical constants.

    ``segments`` lists (label, fraction-of-circumference) for the doped
    phase-shifter regions; the remainder of the ring is the undoped
    isolation region. ``self_coupling`` is the bus self-coupling sigma of
    the all-pass coupler; the shipped defaults slightly over-couple the
    ring (sigma below the 0 V round-trip amplitude).
    """

    radius_um: float
    segments: tuple
    passive_n_eff: float
    group_index: float
    passive_alpha_db_cm: float
    self_coupling: float
    p_in: float = 1.0

    def __post_init__(self):
        segs = tuple((str(lbl), float(fr)) for lbl, fr in self.segments)
        object.__setattr__(self, "segments", segs)
        if not self.radius_um > 0:
            raise ValueError("radius must be positive")
        if not segs:
            raise ValueError("at least one segment required")
        fr = np.array([f for _, f in segs])
        if np.any(fr <= 0):
            raise ValueError("segment fractions must be positive")
        if fr.sum() > 1.0 + 1e-12:
            raise ValueError("segment fractions must sum to at most 1")
        if not 0.0 < self.self_coupling < 1.0:
            raise ValueError("self_coupling must lie in (0, 1)")
        if not self.p_in > 0:
            raise ValueError("p_in must be positive")
        object.__setattr__(self, "_fractions", fr)

    @property
    def n_segments(self) -> int:
        return len(self.segments)

    @property
    def circumference_nm(self) -> float:
        return TWO_PI * self.radius_um * NM_PER_UM

    @property
    def segment_lengths_nm(self) -> np.ndarray:
        return self._fractions * self.circumference_nm

    @property
    def passive_length_nm(self) -> float:
        return self.circumference_nm * (1.0 - float(self._fractions.sum()))


@dataclass(frozen=True)
class DriveState:
    """Per-segment reverse voltages, one entry per RingConfig segment."""

    voltages: tuple

    def __post_init__(self):
        object.__setattr__(self, "voltages", tuple(float(v) for v in self.voltages))
        if any(v < 0 for v in self.voltages):
            raise ValueError("reverse voltages must be non-negative")

    def validate(self, cfg: RingConfig, resp: ElectroOpticResponse) -> None:
        if len(self.voltages) != cfg.n_segments:
            raise ValueError(
                f"drive has {len(self.voltages)} entries for "
                f"{cfg.n_segments} segments"
            )
        interpolate_response(resp, np.array(self.voltages))


def as_voltages(drive, cfg: RingConfig) -> np.ndarray:
    """Coerce a DriveState or plain sequence to a validated voltage vector."""
    if isinstance(drive, DriveState):
        volts = np.array(drive.voltages, dtype=float)
    else:
        volts = np.asarray(drive, dtype=float)
    if volts.shape != (cfg.n_segments,):
        raise ValueError(
            f"drive shape {volts.shape} does not match {cfg.n_segments} segments"
        )
    return volts


def phase_amplitude(cfg: RingConfig, resp: ElectroOpticResponse, lambda_nm, volts):
    """Vectorized round-trip (theta, a); no drive-shape validation.

    ``lambda_nm`` broadcasts against ``volts[..., :-1]``; ``volts`` has the
    segment axis last. First-order dispersion is applied through a single
    group index: n(lambda) = n_ref - (n_g - n_ref) * (lambda - lambda_ref)
    / lambda_ref, which makes the local group index exactly ``group_index``
    at every wavelength.
    """
    lam = np.asarray(lambda_nm, dtype=float)
    dn, alpha = interpolate_response(resp, volts)
    dn = np.atleast_1d(np.asarray(dn))
    alpha = np.atleast_1d(np.asarray(alpha))

    seg_len = cfg.segment_lengths_nm
    circ = cfg.circumference_nm
    disp = (
        (cfg.passive_n_eff - cfg.group_index)
        * (lam - resp.lambda_ref_nm)
        / resp.lambda_ref_nm
    )
    # optical path: passive index + dispersion over the full ring,
    # plus the drive-induced index change over each doped segment
    opl = cfg.passive_n_eff * circ + (dn * seg_len).sum(axis=-1) + disp * circ
    theta = TWO_PI * opl / lam

    loss_db = (alpha * seg_len).sum(axis=-1) + cfg.passive_alpha_db_cm * (
        cfg.passive_length_nm
    )
    a = 10.0 ** (-(loss_db / NM_PER_CM) / 20.0)
    return theta, a


def round_trip(cfg: RingConfig, resp: ElectroOpticResponse, lambda_nm: float, drive):
    """Round-trip phase (radians) and amplitude transmission for one drive."""
    volts = as_voltages(drive, cfg)
    theta, a = phase_amplitude(cfg, resp, float(lambda_nm), volts)
    return float(theta), float(a)


def zero_drive(cfg: RingConfig) -> DriveState:
    return DriveState(voltages=(0.0,) * cfg.n_segments)


def amplitude_at_zero(cfg: RingConfig, resp: ElectroOpticResponse) -> float:
    """Round-trip amplitude with all segments at 0 V (over-coupling check)."""
    _, a = round_trip(cfg, resp, resp.lambda_ref_nm, zero_drive(cfg))
    return a


# ---------------------------------------------------------------------------
# file I/O

RESPONSE_CSV_HEADER = "v_reverse,delta_n_eff,alpha_db_per_cm"


def load_response_csv(path, lambda_ref_nm: float) -> ElectroOpticResponse:
    """Read a response table CSV with header v_reverse,delta_n_eff,alpha_db_per_cm."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0].replace(" ", "") != RESPONSE_CSV_HEADER:
        raise ValueError(f"expected header '{RESPONSE_CSV_HEADER}' in {path}")
    rows = []
    for ln in lines[1:]:
        v, dn, al = (float(x) for x in ln.split(","))
        rows.append((v, dn, al))
    return ElectroOpticResponse(rows=tuple(rows), lambda_ref_nm=lambda_ref_nm)


def save_response_csv(resp: ElectroOpticResponse, path) -> None:
    from .formats import fmt_float

    with open(path, "w", newline="\n") as fh:
        fh.write(RESPONSE_CSV_HEADER + "\n")
        for v, dn, al in resp.rows:
            fh.write(f"{fmt_float(v)},{fmt_float(dn)},{fmt_float(al)}\n")


def ring_config_to_dict(cfg: RingConfig) -> dict:
    return {
        "radius_um": cfg.radius_um,
        "segments": [{"label": lbl, "fraction": fr} for lbl, fr in cfg.segments],
        "passive_n_eff": cfg.passive_n_eff,
        "group_index": cfg.group_index,
        "passive_alpha_db_cm": cfg.passive_alpha_db_cm,
        "self_coupling": cfg.self_coupling,
        "p_in": cfg.p_in,
    }


def ring_config_from_dict(doc: dict) -> RingConfig:
    return RingConfig(
        radius_um=float(doc["radius_um"]),
        segments=tuple((s["label"], float(s["fraction"])) for s in doc["segments"]),
        passive_n_eff=float(doc["passive_n_eff"]),
        group_index=float(doc["group_index"]),
        passive_alpha_db_cm=float(doc["passive_alpha_db_cm"]),
        self_coupling=float(doc["self_coupling"]),
        p_in=float(doc.get("p_in", 1.0)),
    )


def load_ring_config(path) -> RingConfig:
    with open(path) as fh:
        return ring_config_from_dict(json.load(fh))
