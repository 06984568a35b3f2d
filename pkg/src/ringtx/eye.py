"""Optical eye construction and measurement through the quasi-static ring.

The ring responds instantaneously to the drive voltages (cavity dynamics
are out of scope), so the optical power trace is just the static
transmission evaluated sample by sample. Levels are classified by the
known transmitted symbol sequence, not by clustering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .device import ElectroOpticResponse, RingConfig, phase_amplitude
from .errors import InsufficientDataError
from .pam import PamLevels, rlm
from .ring import transmission_from_phase
from .datapath import Waveform


@dataclass(frozen=True)
class EyeRaster:
    """Folded 2-UI eye: counts[power_bin, time_bin], power axis over [0, 1]."""

    counts: np.ndarray
    ui_ps: float
    sample_rate: int

    @property
    def n_power_bins(self) -> int:
        return self.counts.shape[0]

    @property
    def n_time_bins(self) -> int:
        return self.counts.shape[1]

    def total_counts(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class EyeMetrics:
    level_means: tuple
    level_stds: tuple
    level_counts: tuple
    gaps: tuple          # mean-to-mean openings (dP1, dP2, dP3)
    eye_heights: tuple   # 3-sigma-reduced openings
    dynamic_rlm: float

    def to_dict(self) -> dict:
        return {
            "level_means": list(self.level_means),
            "level_stds": list(self.level_stds),
            "level_counts": list(self.level_counts),
            "gaps": list(self.gaps),
            "eye_heights": list(self.eye_heights),
            "dynamic_rlm": self.dynamic_rlm,
        }


def optical_trace(
    wave: Waveform, cfg: RingConfig, resp: ElectroOpticResponse, lambda_nm: float
) -> np.ndarray:
    """Per-sample transmitted power for a drive waveform."""
    if wave.n_segments != cfg.n_segments:
        raise ValueError(
            f"waveform has {wave.n_segments} segments, config {cfg.n_segments}"
        )
    volts = wave.traces.T  # (n_samples, n_segments)
    theta, a = phase_amplitude(cfg, resp, float(lambda_nm), volts)
    return transmission_from_phase(theta, a, cfg.self_coupling)


def fold_eye(trace, ui_ps: float, sample_rate: int, power_bins: int = 128) -> EyeRaster:
    """Fold a power trace modulo 2 UI into a count raster.

    Time bins are the sample phases (floor binning on the uniform grid);
    power bins cover [0, 1]. Every sample lands in exactly one bin.
    """
    t = np.asarray(trace, dtype=float)
    if t.ndim != 1:
        raise ValueError("trace must be 1D")
    width = 2 * sample_rate
    if t.size < 2 * width:
        raise ValueError("trace must cover at least 4 UI")
    cols = np.arange(t.size) % width
    rows = np.clip((t * power_bins).astype(int), 0, power_bins - 1)
    counts = np.zeros((power_bins, width), dtype=np.int64)
    np.add.at(counts, (rows, cols), 1)
    return EyeRaster(counts=counts, ui_ps=ui_ps, sample_rate=sample_rate)


def raster_to_pgm(raster: EyeRaster, maxval: int = 255) -> str:
    """Plain PGM (P2) rendering, brightest = most-hit bin, top row = high power."""
    c = raster.counts
    peak = c.max() if c.max() > 0 else 1
    scaled = (c * maxval) // peak
    lines = [f"P2", f"{raster.n_time_bins} {raster.n_power_bins}", str(maxval)]
    for row in scaled[::-1]:
        lines.append(" ".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"


def eye_metrics(
    trace,
    symbols,
    sample_rate: int,
    window_fraction: float = 0.2,
    min_per_level: int = 100,
) -> EyeMetrics:
    """Level statistics in a centered sampling window, grouped by symbol.

    ``symbols`` holds the transmitted code (0..3) per UI. The window spans
    ``window_fraction`` of the UI centered at mid-UI. Gaps are adjacent
    mean differences; eye heights subtract 3 sigma of both neighbors.
    """
    t = np.asarray(trace, dtype=float)
    syms = np.asarray(symbols)
    if t.size != syms.size * sample_rate:
        raise ValueError("trace length must be symbols * sample_rate")
    if not 0.0 < window_fraction <= 1.0:
        raise ValueError("window_fraction must lie in (0, 1]")

    lo = int(math.floor((0.5 - window_fraction / 2.0) * sample_rate))
    hi = int(math.ceil((0.5 + window_fraction / 2.0) * sample_rate))
    hi = max(hi, lo + 1)
    per_ui = t.reshape(syms.size, sample_rate)[:, lo:hi]

    means, stds, counts = [], [], []
    for code in range(4):
        vals = per_ui[syms == code].ravel()
        if vals.size < min_per_level:
            raise InsufficientDataError(
                f"level {code} has {vals.size} samples in window, "
                f"need at least {min_per_level}"
            )
        means.append(float(vals.mean()))
        stds.append(float(vals.std()))
        counts.append(int(vals.size))

    gaps = tuple(means[k] - means[k - 1] for k in range(1, 4))
    heights = tuple(
        gaps[k - 1] - 3.0 * (stds[k] + stds[k - 1]) for k in range(1, 4)
    )
    dyn = rlm(PamLevels(*means))
    return EyeMetrics(
        level_means=tuple(means),
        level_stds=tuple(stds),
        level_counts=tuple(counts),
        gaps=gaps,
        eye_heights=heights,
        dynamic_rlm=dyn,
    )
