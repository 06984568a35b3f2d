"""Behavioral transmitter datapath: PRBS, LUT encoding, 4:1 serialization,
driver swing quantization and bandwidth-limited waveform shaping.

The electrical path is modeled at the bit/waveform level only: clocking is
ideal, the driver reduces to a swing DAC plus a single-pole low-pass, and
a logic 1 applies the swing as reverse bias on the segment (bit 1 => ring
segment depleted => resonance pushed away from the carrier).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

# maximal-length Fibonacci LFSR feedback taps (standard ITU-T choices):
# x^7 + x^6 + 1, x^15 + x^14 + 1, x^31 + x^28 + 1
PRBS_TAPS = {7: (7, 6), 15: (15, 14), 31: (31, 28)}

SWING_BASE_VPP = 1.32
SWING_STEP_V = 0.206
SWING_MAX_VPP = 3.2
SWING_CODE_MAX = 15


@dataclass(frozen=True)
class PrbsConfig:
    """LFSR order and seed; seed defaults to the all-ones pattern."""

    order: int = 7
    seed: int | None = None

    def __post_init__(self):
        if self.order not in PRBS_TAPS:
            raise ValueError(f"order must be one of {sorted(PRBS_TAPS)}")
        if self.seed is None:
            object.__setattr__(self, "seed", (1 << self.order) - 1)
        seed = int(self.seed)
        if seed == 0:
            raise ValueError("seed must be a nonzero bit pattern")
        if not 0 < seed < (1 << self.order):
            raise ValueError(f"seed must fit in {self.order} bits")
        object.__setattr__(self, "seed", seed)

    @property
    def period(self) -> int:
        return (1 << self.order) - 1


def prbs_sequence(cfg: PrbsConfig, n: int) -> np.ndarray:
    """First ``n`` output bits of the Fibonacci LFSR (uint8 array)."""
    if n < 1:
        raise ValueError("need at least one bit")
    t1, t2 = PRBS_TAPS[cfg.order]
    mask = (1 << cfg.order) - 1
    state = cfg.seed
    out = np.empty(n, dtype=np.uint8)
    for i in range(n):
        fb = ((state >> (t1 - 1)) ^ (state >> (t2 - 1))) & 1
        state = ((state << 1) | fb) & mask
        out[i] = fb
    return out


# ---------------------------------------------------------------------------
# LUT encoding

_THERMOMETER_TABLES = ((0, 1, 1, 1), (0, 0, 1, 1), (0, 0, 0, 1))
_NRZ_TABLES = ((0, 0, 1, 1),) * 3


@dataclass(frozen=True)
class LutConfig:
    """Per-slice 4-entry bit tables indexed by the symbol code 2*MSB+LSB."""

    mode: str  # "nrz" | "pam4"
    tables: tuple = ()

    def __post_init__(self):
        if self.mode not in ("nrz", "pam4"):
            raise ValueError("mode must be 'nrz' or 'pam4'")
        tables = self.tables or (
            _NRZ_TABLES if self.mode == "nrz" else _THERMOMETER_TABLES
        )
        tables = tuple(tuple(int(b) for b in t) for t in tables)
        if len(tables) != 3 or any(len(t) != 4 for t in tables):
            raise ValueError("need three 4-entry tables")
        if any(b not in (0, 1) for t in tables for b in t):
            raise ValueError("table entries must be bits")
        if self.mode == "nrz":
            if not (tables[0] == tables[1] == tables[2]):
                raise ValueError("NRZ mode requires identical slice tables")
        else:
            for code in range(4):
                col = [t[code] for t in tables]
                if sum(col) != code or sorted(col, reverse=True) != col:
                    raise ValueError(
                        "PAM4 tables must be thermometer-coded (prefix property)"
                    )
        object.__setattr__(self, "tables", tables)

    @classmethod
    def pam4(cls) -> "LutConfig":
        return cls(mode="pam4")

    @classmethod
    def nrz(cls) -> "LutConfig":
        return cls(mode="nrz")


def encode_pam4(msb: int, lsb: int, lut: LutConfig):
    """Thermometer segment bits (s1, s2, s3) for one PAM-4 symbol."""
    if lut.mode != "pam4":
        raise ValueError("encode_pam4 requires a PAM4-mode LUT")
    code = 2 * int(msb) + int(lsb)
    return tuple(t[code] for t in lut.tables)


# ---------------------------------------------------------------------------
# serialization

LANES = 4


def serialize_lanes(lanes):
    """Round-robin 4:1 mux core: output[i] = lanes[i % 4][i // 4]."""
    if len(lanes) != LANES:
        raise ValueError(f"expected {LANES} lanes")
    length = len(lanes[0])
    if any(len(l) != length for l in lanes):
        raise ValueError("lanes must have equal length")
    arr = np.asarray(lanes)
    return arr.T.reshape(-1).copy()

def serialize(words, lanes: int = LANES):
    """Split 8-wide words into even/odd bit branches and serialize each 4:1.

    Even bit positions feed the MSB branch, odd the LSB branch, so symbol i
    is (word[i // 4][2*(i % 4)], word[i // 4][2*(i % 4) + 1]). Returns
    (msb_bits, lsb_bits).
    """
    if lanes != LANES:
        raise ValueError("quarter-rate architecture: lanes must be 4")
    w = np.asarray(words)
    if w.ndim != 2 or w.shape[1] != 8:
        raise ValueError("words must be an N x 8 bit array")
    if w.shape[0] % lanes != 0:
        raise ValueError(f"word count must be a multiple of {lanes}")
    msb = w[:, 0::2].reshape(-1).copy()
    lsb = w[:, 1::2].reshape(-1).copy()
    return msb, lsb


def deserialize(msb_bits, lsb_bits, lanes: int = LANES):
    """Inverse of ``serialize``: rebuild the N x 8 word array."""
    msb = np.asarray(msb_bits)
    lsb = np.asarray(lsb_bits)
    if msb.shape != lsb.shape or msb.ndim != 1:
        raise ValueError("branch streams must be equal-length 1D arrays")
    if msb.size % lanes != 0:
        raise ValueError(f"stream length must be a multiple of {lanes}")
    n = msb.size // lanes
    words = np.empty((n, 8), dtype=msb.dtype)
    words[:, 0::2] = msb.reshape(n, lanes)
    words[:, 1::2] = lsb.reshape(n, lanes)
    return words


def bits_to_words(bits, width: int = 8) -> np.ndarray:
    b = np.asarray(bits)
    if b.size % width != 0:
        raise ValueError(f"bit count must be a multiple of {width}")
    return b.reshape(-1, width)


# ---------------------------------------------------------------------------
# driver

def swing_for_code(code: int) -> float:
    """Peak-to-peak swing for one 4-bit setting, clamped to the swing range.

    The nominal step law 1.32 + 0.206 * code overruns 3.2 Vpp from code 10
    up, so the top codes saturate there.
    """
    code = int(code)
    if not 0 <= code <= SWING_CODE_MAX:
        raise ValueError(f"swing code must be 0..{SWING_CODE_MAX}")
    return min(SWING_BASE_VPP + SWING_STEP_V * code, SWING_MAX_VPP)


def code_for_swing(target_vpp: float) -> int:
    """Smallest code whose realized swing is nearest ``target_vpp``."""
    best, best_err = 0, float("inf")
    for code in range(SWING_CODE_MAX + 1):
        err = abs(swing_for_code(code) - target_vpp)
        if err < best_err - 1e-15:
            best, best_err = code, err
    return best


@dataclass(frozen=True)
class DriverConfig:
    """Output-stage setting: swing codes per polarity and analog bandwidth."""

    sw_p: int = 3
    sw_n: int = 3
    bandwidth_ghz: float = 40.0

    def __post_init__(self):
        swing_for_code(self.sw_p)
        swing_for_code(self.sw_n)
        if not self.bandwidth_ghz > 0:
            raise ValueError("bandwidth must be positive")

    @property
    def swing_vpp(self) -> float:
        # symmetric codes are the default; asymmetric settings average
        return 0.5 * (swing_for_code(self.sw_p) + swing_for_code(self.sw_n))


@dataclass(frozen=True)
class Waveform:
    """Per-segment voltage samples on a uniform grid of ``sample_rate`` per UI."""

    ui_ps: float
    sample_rate: int
    traces: np.ndarray  # shape (n_segments, n_samples)

    def __post_init__(self):
        tr = np.atleast_2d(np.asarray(self.traces, dtype=float))
        object.__setattr__(self, "traces", tr)
        if self.sample_rate < 8:
            raise ValueError("sample_rate must be at least 8 samples per UI")
        if not self.ui_ps > 0:
            raise ValueError("ui_ps must be positive")

    @property
    def n_segments(self) -> int:
        return self.traces.shape[0]

    @property
    def n_samples(self) -> int:
        return self.traces.shape[1]

    @property
    def t_ps(self) -> np.ndarray:
        return np.arange(self.n_samples) * (self.ui_ps / self.sample_rate)


def drive_waveform(segment_bits, drivers, ui_ps: float, sample_rate: int) -> Waveform:
    """NRZ levels {0, swing} per segment through a single-pole low-pass.

    ``drivers`` is one DriverConfig for all segments or one per segment.
    The filter state starts at the first ideal sample, so a pattern that
    begins at rest has no startup transient.
    """
    bits = [np.asarray(b) for b in segment_bits]
    if not bits or any(b.ndim != 1 for b in bits):
        raise ValueError("segment_bits must be 1D bit arrays")
    if any(b.size != bits[0].size for b in bits):
        raise ValueError("segment bit streams must have equal length")
    if isinstance(drivers, DriverConfig):
        drivers = [drivers] * len(bits)
    if len(drivers) != len(bits):
        raise ValueError("need one driver config per segment")

    dt_ps = ui_ps / sample_rate
    traces = []
    for b, drv in zip(bits, drivers):
        ideal = np.repeat(b.astype(float) * drv.swing_vpp, sample_rate)
        tau_ps = 1e3 / (2.0 * math.pi * drv.bandwidth_ghz)
        decay = math.exp(-dt_ps / tau_ps)
        alpha = 1.0 - decay
        # y[n] = alpha x[n] + (1-alpha) y[n-1], warm-started at x[0]
        zi = np.array([decay * ideal[0]])
        shaped, _ = lfilter([alpha], [1.0, -decay], ideal, zi=zi)
        traces.append(shaped)
    return Waveform(ui_ps=ui_ps, sample_rate=sample_rate, traces=np.array(traces))


def waveform_csv_rows(wave: Waveform):
    """(header, rows) for the t_ps,v_s1,v_s2,... waveform CSV."""
    header = ["t_ps"] + [f"v_s{i + 1}" for i in range(wave.n_segments)]
    t = wave.t_ps
    rows = [
        (t[j], *(wave.traces[i, j] for i in range(wave.n_segments)))
        for j in range(wave.n_samples)
    ]
    return header, rows


def pam4_segment_bits(msb_bits, lsb_bits, lut: LutConfig):
    """Per-segment bit streams for a symbol stream given by its bit branches."""
    msb = np.asarray(msb_bits).astype(np.int64)
    lsb = np.asarray(lsb_bits).astype(np.int64)
    if msb.shape != lsb.shape:
        raise ValueError("branch streams must have equal length")
    codes = 2 * msb + lsb
    tables = np.asarray(lut.tables)
    return [tables[s][codes] for s in range(3)]
