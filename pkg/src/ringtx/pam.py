"""PAM-4 drive encodings, optical levels and linearity metrics.

Two encodings map a 2-bit symbol onto per-segment reverse voltages:

* thermometer (three equal segments): code k drives segments 1..k, so a
  higher code pushes the resonance further from the carrier and transmits
  more power; the carrier sits on the short-wavelength side of the 0 V
  resonance.
* binary (two segments, long MSB / short LSB): each bit gates its own
  segment independently.

The ratio-of-level-mismatch (RLM) figure compares the inner levels to the
midpoint of the outer ones; 1 means perfectly equidistant levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .device import ElectroOpticResponse, RingConfig
from .errors import DegenerateLevelsError, MetricDomainError
from .ring import transmission

THREE_SEGMENT_THERMOMETER = "three_segment_thermometer"
TWO_SEGMENT_BINARY = "two_segment_binary"


@dataclass(frozen=True)
class ThermometerEncoding:
    """Code k drives the first k segments at (v1..vk), the rest at 0 V."""

    v1: float
    v2: float
    v3: float

    kind = THREE_SEGMENT_THERMOMETER

    def drive_for(self, code: int):
        if code not in (0, 1, 2, 3):
            raise ValueError("PAM-4 code must be 0..3")
        volts = (self.v1, self.v2, self.v3)
        return tuple(volts[i] if i < code else 0.0 for i in range(3))

    def voltages_dict(self) -> dict:
        return {"v1": self.v1, "v2": self.v2, "v3": self.v3}


@dataclass(frozen=True)
class BinaryEncoding:
    """code = 2*MSB + LSB; each bit gates its segment at its own voltage."""

    v_msb: float
    v_lsb: float

    kind = TWO_SEGMENT_BINARY

    def drive_for(self, code: int):
        if code not in (0, 1, 2, 3):
            raise ValueError("PAM-4 code must be 0..3")
        return (
            self.v_msb if code & 2 else 0.0,
            self.v_lsb if code & 1 else 0.0,
        )

    def voltages_dict(self) -> dict:
        return {"v_msb": self.v_msb, "v_lsb": self.v_lsb}


@dataclass(frozen=True)
class PamLevels:
    """The four transmitted optical power levels, normalized to P_IN = 1."""

    p0: float
    p1: float
    p2: float
    p3: float

    def as_tuple(self):
        return (self.p0, self.p1, self.p2, self.p3)


@dataclass(frozen=True)
class LinearityMetrics:
    rlm: float
    es1: float
    es2: float
    il_db: float
    er_db: float
    tp_db: float

    def to_dict(self) -> dict:
        return {
            "rlm": self.rlm,
            "es1": self.es1,
            "es2": self.es2,
            "il_db": self.il_db,
            "er_db": self.er_db,
            "tp_db": self.tp_db,
        }


def levels_for(cfg: RingConfig, resp: ElectroOpticResponse, lambda_nm: float, encoding) -> PamLevels:
    """Transmission at the drive state of each PAM-4 code."""
    expected = 3 if encoding.kind == THREE_SEGMENT_THERMOMETER else 2
    if cfg.n_segments != expected:
        raise ValueError(
            f"{encoding.kind} encoding needs {expected} segments, "
            f"config has {cfg.n_segments}"
        )
    p = [transmission(cfg, resp, lambda_nm, encoding.drive_for(code)) for code in range(4)]
    return PamLevels(*p)


def level_mismatch(levels: PamLevels):
    """(rlm, es1, es2) per the level-mismatch definition.

    The min terms are computed as (3*(p - p_min)) / (outer - p_min) so that
    exactly equidistant levels yield rlm == 1.0 in floating point.
    """
    p0, p1, p2, p3 = levels.as_tuple()
    if p0 == p3:
        raise DegenerateLevelsError("outer levels coincide; RLM undefined")
    p_min = 0.5 * (p0 + p3)
    es1 = (p1 - p_min) / (p0 - p_min)
    es2 = (p2 - p_min) / (p3 - p_min)
    t1 = (3.0 * (p1 - p_min)) / (p0 - p_min)
    t2 = (3.0 * (p2 - p_min)) / (p3 - p_min)
    value = min(t1, t2, 2.0 - t1, 2.0 - t2)
    return value, es1, es2


def rlm(levels: PamLevels) -> float:
    return level_mismatch(levels)[0]


def rlm_array(p0, p1, p2, p3):
    """Vectorized rlm for sweeps; degenerate quadruples map to -inf."""
    p_min = 0.5 * (p0 + p3)
    d0 = p0 - p_min
    d3 = p3 - p_min
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = 3.0 * (p1 - p_min) / d0
        t2 = 3.0 * (p2 - p_min) / d3
        out = np.minimum(np.minimum(t1, t2), np.minimum(2.0 - t1, 2.0 - t2))
    return np.where(np.isfinite(out), out, -np.inf)


def il(levels: PamLevels, p_in: float = 1.0) -> float:
    """Insertion loss at the brightest level, dB."""
    if levels.p3 <= 0:
        raise MetricDomainError("insertion loss needs a positive top level")
    return -10.0 * math.log10(levels.p3 / p_in)


def er(levels: PamLevels) -> float:
    """Extinction ratio between outermost levels, dB."""
    if levels.p0 <= 0 or levels.p3 <= 0:
        raise MetricDomainError("extinction ratio needs positive outer levels")
    return 10.0 * math.log10(levels.p3 / levels.p0)


def tp(levels: PamLevels, p_in: float = 1.0) -> float:
    """Transmission penalty 10*log10(2*P_IN / (p_top + p_bottom)), dB.

    Defined for NRZ one/zero powers; applied here with the outermost PAM-4
    levels standing in for them.
    """
    s = levels.p3 + levels.p0
    if s <= 0:
        raise MetricDomainError("transmission penalty needs positive level sum")
    return 10.0 * math.log10(2.0 * p_in / s)


def linearity_metrics(levels: PamLevels, p_in: float = 1.0) -> LinearityMetrics:
    value, es1, es2 = level_mismatch(levels)
    return LinearityMetrics(
        rlm=value,
        es1=es1,
        es2=es2,
        il_db=il(levels, p_in),
        er_db=er(levels),
        tp_db=tp(levels, p_in),
    )


def metrics_record(lambda_nm: float, levels: PamLevels, metrics: LinearityMetrics) -> dict:
    """JSON-ready record {lambda_nm, p0..p3, rlm, il_db, er_db, tp_db}."""
    return {
        "lambda_nm": lambda_nm,
        "p0": levels.p0,
        "p1": levels.p1,
        "p2": levels.p2,
        "p3": levels.p3,
        "rlm": metrics.rlm,
        "il_db": metrics.il_db,
        "er_db": metrics.er_db,
        "tp_db": metrics.tp_db,
    }
