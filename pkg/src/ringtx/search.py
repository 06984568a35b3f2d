"""Drive-voltage solving and linear-output wavelength-window mapping.

``solve_three_segment`` exploits the thermometer structure: with V1 fixed,
the bottom two levels are pinned, so V2 and V3 fall out of two sequential
1D bracketed root solves on the level-spacing residuals. The two-segment
encoding has no exact solve in general (the top eye is tied to the lower
two), so ``best_rlm_two_segment`` maximizes RLM over the bounded voltage
box instead. ``linear_range`` maps, per wavelength, the best achievable
RLM under drive-voltage bounds and reports the maximal contiguous window
above a linearity threshold together with its insertion-loss span.

Per-wavelength work items are independent; results are assembled in grid
order regardless of worker count.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .device import ElectroOpticResponse, RingConfig, phase_amplitude
from .errors import EmptyWindowError
from .pam import (
    THREE_SEGMENT_THERMOMETER,
    TWO_SEGMENT_BINARY,
    BinaryEncoding,
    LinearityMetrics,
    PamLevels,
    ThermometerEncoding,
    levels_for,
    linearity_metrics,
    rlm_array,
)
from .ring import transmission_from_phase

ROOT_XTOL_V = 1e-9  # root tolerance, well under the 1e-6 V contract
COARSE_STEP_V = 0.025
REFINE_TOL_V = 1e-4


@dataclass(frozen=True)
class VoltageBounds:
    """Allowed ON-state drive voltage interval (the NRZ swing target).

    A collapsed interval (lo == hi) expresses the fixed-drive protocol.
    """

    lo: float = 1.5
    hi: float = 3.0

    def __post_init__(self):
        if not 0.0 <= self.lo <= self.hi:
            raise ValueError("bounds must satisfy 0 <= lo <= hi")

    def contains(self, v: float, slack: float = 1e-9) -> bool:
        return (self.lo - slack) <= v <= (self.hi + slack)


@dataclass(frozen=True)
class SolveResult:
    lambda_nm: float
    encoding: object
    achieved_rlm: float
    metrics: LinearityMetrics | None
    converged: bool
    note: str = ""

    def to_dict(self) -> dict:
        doc = {"lambda_nm": self.lambda_nm, "encoding": self.encoding.kind}
        doc.update(self.encoding.voltages_dict())
        doc["achieved_rlm"] = self.achieved_rlm
        doc["converged"] = self.converged
        doc["metrics"] = self.metrics.to_dict() if self.metrics else None
        if self.note:
            doc["note"] = self.note
        return doc


@dataclass(frozen=True)
class PerLambdaSolution:
    lambda_nm: float
    best_rlm: float
    voltages: tuple  # (v2, v3) thermometer / (v_msb, v_lsb) binary
    il_db: float
    er_db: float
    tp_db: float
    qualifies: bool
    solved_exact: bool


@dataclass(frozen=True)
class RangeReport:
    """Contiguous qualifying wavelength window and its IL span."""

    encoding_kind: str
    threshold: float
    bounds: VoltageBounds
    protocol: str
    lambda_min_nm: float | None
    lambda_max_nm: float | None
    window_width_nm: float
    il_min_db: float | None
    il_max_db: float | None
    n_qualifying: int
    entries: tuple
    runs: tuple  # every qualifying (lambda_min, lambda_max) run

    def to_dict(self) -> dict:
        return {
            "encoding": self.encoding_kind,
            "threshold": self.threshold,
            "bounds": {"lo": self.bounds.lo, "hi": self.bounds.hi},
            "protocol": self.protocol,
            "lambda_min_nm": self.lambda_min_nm,
            "lambda_max_nm": self.lambda_max_nm,
            "window_width_nm": self.window_width_nm,
            "il_min_db": self.il_min_db,
            "il_max_db": self.il_max_db,
            "n_qualifying": self.n_qualifying,
            "runs": [{"lambda_min_nm": a, "lambda_max_nm": b} for a, b in self.runs],
        }


def _metrics_or_none(cfg, resp, lambda_nm, encoding):
    try:
        levels = levels_for(cfg, resp, lambda_nm, encoding)
        return linearity_metrics(levels, cfg.p_in)
    except Exception:
        return None


def solve_three_segment(
    cfg: RingConfig,
    resp: ElectroOpticResponse,
    lambda_nm: float,
    v1: float = 2.0,
    bounds: VoltageBounds = VoltageBounds(),
) -> SolveResult:
    """Sequential decoupled solve for V2, V3 giving equidistant levels.

    p0, p1 are fixed by v1. V2 is the bracketed root of
    (p2 - p1) - (p1 - p0) over the table's voltage range, then V3 of
    (p3 - p2) - (p1 - p0). The found voltages are reported even when they
    leave ``bounds``; ``converged`` is False when out of bounds or when a
    residual never changes sign (no solution). v1 itself is the caller's
    protocol choice and is not bounds-checked.
    """
    lam = float(lambda_nm)
    if not lam > 0:
        raise ValueError("wavelength must be positive")
    p0 = _t_scalar(cfg, resp, lam, (0.0, 0.0, 0.0))
    p1 = _t_scalar(cfg, resp, lam, (v1, 0.0, 0.0))
    gap = p1 - p0
    v_hi = resp.v_max

    if not gap > 0:
        enc = ThermometerEncoding(v1, math.nan, math.nan)
        return SolveResult(lam, enc, math.nan, None, False, "no first-gap (p1 <= p0)")

    def resid2(v2: float) -> float:
        return (_t_scalar(cfg, resp, lam, (v1, v2, 0.0)) - p1) - gap

    if resid2(v_hi) < 0.0:
        enc = ThermometerEncoding(v1, math.nan, math.nan)
        return SolveResult(lam, enc, math.nan, None, False, "no bracket for v2")
    v2 = float(brentq(resid2, 0.0, v_hi, xtol=ROOT_XTOL_V))
    p2 = _t_scalar(cfg, resp, lam, (v1, v2, 0.0))

    def resid3(v3: float) -> float:
        return (_t_scalar(cfg, resp, lam, (v1, v2, v3)) - p2) - gap

    if resid3(v_hi) < 0.0:
        enc = ThermometerEncoding(v1, v2, math.nan)
        return SolveResult(lam, enc, math.nan, None, False, "no bracket for v3")
    v3 = float(brentq(resid3, 0.0, v_hi, xtol=ROOT_XTOL_V))

    enc = ThermometerEncoding(v1, v2, v3)
    metrics = _metrics_or_none(cfg, resp, lam, enc)
    achieved = metrics.rlm if metrics else math.nan
    in_bounds = bounds.contains(v2) and bounds.contains(v3)
    note = "" if in_bounds else "solution outside voltage bounds"
    return SolveResult(lam, enc, achieved, metrics, in_bounds, note)


def _t_scalar(cfg, resp, lam, volts):
    theta, a = phase_amplitude(cfg, resp, lam, np.asarray(volts, dtype=float))
    return float(transmission_from_phase(theta, a, cfg.self_coupling))


def _voltage_axis(bounds: VoltageBounds, step: float) -> np.ndarray:
    if bounds.hi == bounds.lo:
        return np.array([bounds.lo])
    n = int(math.floor((bounds.hi - bounds.lo) / step + 1e-9)) + 1
    axis = bounds.lo + step * np.arange(n)
    if axis[-1] < bounds.hi - 1e-12:
        axis = np.append(axis, bounds.hi)
    return axis


def _maximize_rlm_box(level_fn, bounds: VoltageBounds):
    """Coarse-grid scan then coordinate descent for max rlm over a box.

    ``level_fn(vx, vy)`` must broadcast and return (p0, p1, p2, p3).
    Grid ties resolve to the smallest first voltage, then the smallest
    second voltage (row-major argmax). Fully deterministic.
    """
    axis = _voltage_axis(bounds, COARSE_STEP_V)
    vx_g, vy_g = np.meshgrid(axis, axis, indexing="ij")
    grid = rlm_array(*level_fn(vx_g, vy_g))
    flat = int(np.argmax(grid))
    i, j = np.unravel_index(flat, grid.shape)
    vx, vy = float(axis[i]), float(axis[j])

    def score(x: float, y: float) -> float:
        val = rlm_array(*level_fn(np.float64(x), np.float64(y)))
        return float(val)

    best = score(vx, vy)
    if bounds.hi == bounds.lo:
        return vx, vy, best

    span = COARSE_STEP_V
    for _ in range(40):
        moved = 0.0
        for which in (0, 1):
            cur = vx if which == 0 else vy
            lo = max(bounds.lo, cur - span)
            hi = min(bounds.hi, cur + span)
            if which == 0:
                obj = lambda x: -score(x, vy)
            else:
                obj = lambda y: -score(vx, y)
            res = minimize_scalar(
                obj, bounds=(lo, hi), method="bounded", options={"xatol": 1e-5}
            )
            cand, val = float(res.x), -float(res.fun)
            if val > best:
                moved = max(moved, abs(cand - cur))
                best = val
                if which == 0:
                    vx = cand
                else:
                    vy = cand
        if moved < REFINE_TOL_V:
            break
    return vx, vy, best


def _two_seg_level_fn(cfg, resp, lam):
    sigma = cfg.self_coupling

    def tx(volts):
        theta, a = phase_amplitude(cfg, resp, lam, volts)
        return transmission_from_phase(theta, a, sigma)

    def level_fn(vm, vl):
        vm, vl = np.broadcast_arrays(np.asarray(vm, float), np.asarray(vl, float))
        z = np.zeros_like(vm)
        p0 = tx(np.stack([z, z], axis=-1))
        p1 = tx(np.stack([z, vl], axis=-1))
        p2 = tx(np.stack([vm, z], axis=-1))
        p3 = tx(np.stack([vm, vl], axis=-1))
        return p0, p1, p2, p3

    return level_fn


def _three_seg_level_fn(cfg, resp, lam, v1):
    sigma = cfg.self_coupling

    def tx(volts):
        theta, a = phase_amplitude(cfg, resp, lam, volts)
        return transmission_from_phase(theta, a, sigma)

    p0 = _t_scalar(cfg, resp, lam, (0.0, 0.0, 0.0))
    p1 = _t_scalar(cfg, resp, lam, (v1, 0.0, 0.0))

    def level_fn(v2, v3):
        v2, v3 = np.broadcast_arrays(np.asarray(v2, float), np.asarray(v3, float))
        z = np.zeros_like(v2)
        ones = np.full_like(v2, v1)
        p2 = tx(np.stack([ones, v2, z], axis=-1))
        p3 = tx(np.stack([ones, v2, v3], axis=-1))
        return (np.full_like(p2, p0), np.full_like(p2, p1), p2, p3)

    return level_fn


def best_rlm_two_segment(
    cfg: RingConfig,
    resp: ElectroOpticResponse,
    lambda_nm: float,
    bounds: VoltageBounds = VoltageBounds(),
) -> SolveResult:
    """Maximize rlm over (V_MSB, V_LSB) in the bounds box.

    25 mV coarse grid, then coordinate descent refined to 1e-4 V.
    """
    lam = float(lambda_nm)
    level_fn = _two_seg_level_fn(cfg, resp, lam)
    vm, vl, _ = _maximize_rlm_box(level_fn, bounds)
    enc = BinaryEncoding(v_msb=vm, v_lsb=vl)
    metrics = _metrics_or_none(cfg, resp, lam, enc)
    achieved = metrics.rlm if metrics else math.nan
    return SolveResult(lam, enc, achieved, metrics, True, "bounded maximum")


def _best_three_segment_bounded(cfg, resp, lam, v1, bounds):
    level_fn = _three_seg_level_fn(cfg, resp, lam, v1)
    v2, v3, _ = _maximize_rlm_box(level_fn, bounds)
    enc = ThermometerEncoding(v1, v2, v3)
    metrics = _metrics_or_none(cfg, resp, lam, enc)
    achieved = metrics.rlm if metrics else math.nan
    return SolveResult(lam, enc, achieved, metrics, True, "bounded maximum")


def _solve_at_lambda(cfg, resp, kind, lam, bounds, v1_fixed) -> SolveResult:
    if kind == THREE_SEGMENT_THERMOMETER:
        res = solve_three_segment(cfg, resp, lam, v1_fixed, bounds)
        if res.converged:
            return res
        return _best_three_segment_bounded(cfg, resp, lam, v1_fixed, bounds)
    if kind == TWO_SEGMENT_BINARY:
        return best_rlm_two_segment(cfg, resp, lam, bounds)
    raise ValueError(f"unknown encoding kind {kind!r}")


def linear_range(
    cfg: RingConfig,
    resp: ElectroOpticResponse,
    encoding_kind: str,
    bounds: VoltageBounds,
    lambda_grid,
    threshold: float = 0.95,
    v1_fixed: float = 2.0,
    threads: int = 1,
) -> RangeReport:
    """Best achievable RLM per grid wavelength and the qualifying window.

    For the thermometer encoding the exact solve (RLM = 1) is used where
    its voltages land in bounds; elsewhere, and for the binary encoding
    always, the bounded RLM maximum is taken. The reported window is the
    maximal contiguous qualifying run; disconnected qualifying runs raise
    a warning and are all listed in the report.
    """
    grid = np.asarray(lambda_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 1:
        raise ValueError("lambda_grid must be a non-empty 1D array")
    if grid.size > 1:
        steps = np.diff(grid)
        if np.any(steps <= 0):
            raise ValueError("lambda_grid must be strictly ascending")
        if steps.max() > 0.001 + 1e-12:
            raise ValueError("lambda grid step must be at most 0.001 nm")
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")

    def entry_for(lam: float) -> PerLambdaSolution:
        res = _solve_at_lambda(cfg, resp, encoding_kind, float(lam), bounds, v1_fixed)
        enc = res.encoding
        if encoding_kind == THREE_SEGMENT_THERMOMETER:
            volts = (enc.v2, enc.v3)
        else:
            volts = (enc.v_msb, enc.v_lsb)
        m = res.metrics
        best = res.achieved_rlm
        qualifies = math.isfinite(best) and best >= threshold
        return PerLambdaSolution(
            lambda_nm=float(lam),
            best_rlm=best,
            voltages=volts,
            il_db=m.il_db if m else math.nan,
            er_db=m.er_db if m else math.nan,
            tp_db=m.tp_db if m else math.nan,
            qualifies=qualifies,
            solved_exact=(res.note not in ("bounded maximum",) and res.converged),
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            entries = list(pool.map(entry_for, grid))
    else:
        entries = [entry_for(lam) for lam in grid]

    qual = np.array([e.qualifies for e in entries], dtype=bool)
    runs = _contiguous_runs(qual)
    run_spans = tuple(
        (entries[a].lambda_nm, entries[b].lambda_nm) for a, b in runs
    )
    if len(runs) > 1:
        spans = "; ".join(f"[{a:.6f}, {b:.6f}]" for a, b in run_spans)
        warnings.warn(
            f"qualifying set is disconnected: {len(runs)} runs: {spans} nm",
            UserWarning,
            stacklevel=2,
        )

    protocol = "fixed-drive" if bounds.lo == bounds.hi else "bounded-search"
    if not runs:
        return RangeReport(
            encoding_kind=encoding_kind,
            threshold=threshold,
            bounds=bounds,
            protocol=protocol,
            lambda_min_nm=None,
            lambda_max_nm=None,
            window_width_nm=0.0,
            il_min_db=None,
            il_max_db=None,
            n_qualifying=0,
            entries=tuple(entries),
            runs=(),
        )

    # maximal contiguous run; first one wins ties
    sizes = [b - a + 1 for a, b in runs]
    a, b = runs[int(np.argmax(sizes))]
    window = entries[a : b + 1]
    ils = np.array([e.il_db for e in window], dtype=float)
    return RangeReport(
        encoding_kind=encoding_kind,
        threshold=threshold,
        bounds=bounds,
        protocol=protocol,
        lambda_min_nm=window[0].lambda_nm,
        lambda_max_nm=window[-1].lambda_nm,
        window_width_nm=window[-1].lambda_nm - window[0].lambda_nm,
        il_min_db=float(np.nanmin(ils)),
        il_max_db=float(np.nanmax(ils)),
        n_qualifying=len(window),
        entries=tuple(entries),
        runs=run_spans,
    )


def _contiguous_runs(mask: np.ndarray):
    runs = []
    start = None
    for i, q in enumerate(mask):
        if q and start is None:
            start = i
        elif not q and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(mask) - 1))
    return runs


def il_tuning_range(report: RangeReport) -> float:
    """Insertion-loss span (dB) across the qualifying window."""
    if report.n_qualifying == 0:
        raise EmptyWindowError("no qualifying wavelengths in report")
    return report.il_max_db - report.il_min_db
