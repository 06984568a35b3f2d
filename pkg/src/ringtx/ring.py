"""All-pass ring power transmission, spectra and resonance descriptors.

The single-bus all-pass transfer function is the only model consistent
with the device (one bus waveguide coupled to one ring):

    T = |(sigma - a e^{i theta}) / (1 - sigma a e^{i theta})|^2

with round-trip phase ``theta`` and amplitude ``a`` from the device layer.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .device import (
    ElectroOpticResponse,
    RingConfig,
    as_voltages,
    phase_amplitude,
    zero_drive,
)
from .errors import ResonanceSearchError

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SpectrumPoint:
    lambda_nm: float
    transmission: float


@dataclass(frozen=True)
class ResonanceInfo:
    """Descriptors of one Lorentzian-shaped resonance dip."""

    lambda_res_nm: float
    fwhm_nm: float
    extinction_db: float
    q_factor: float
    fsr_nm: float | None = None

    def to_dict(self) -> dict:
        return {
            "lambda_res_nm": self.lambda_res_nm,
            "fwhm_nm": self.fwhm_nm,
            "extinction_db": self.extinction_db,
            "q_factor": self.q_factor,
            "fsr_nm": self.fsr_nm,
        }


def transmission_from_phase(theta, a, sigma):
    """|(sigma - a e^{i theta}) / (1 - sigma a e^{i theta})|^2.

    Evaluated as ((sigma-a)^2 + 4 sigma a sin^2(theta/2)) /
    ((1-sigma a)^2 + 4 sigma a sin^2(theta/2)): algebraically identical but
    free of the near-resonance cancellation of the cos form, which would
    limit resonance location to ~1e-8 nm.
    """
    s2 = np.sin(0.5 * np.asarray(theta)) ** 2
    cross = 4.0 * sigma * a * s2
    num = (sigma - a) ** 2 + cross
    den = (1.0 - sigma * a) ** 2 + cross
    return num / den


def transmission(cfg: RingConfig, resp: ElectroOpticResponse, lambda_nm: float, drive) -> float:
    """Normalized power transmission at one wavelength for one drive state."""
    volts = as_voltages(drive, cfg)
    theta, a = phase_amplitude(cfg, resp, float(lambda_nm), volts)
    return float(transmission_from_phase(theta, a, cfg.self_coupling))


def transmission_grid(cfg, resp, lambda_nm, drive):
    """Transmission over an array of wavelengths at a fixed drive."""
    volts = as_voltages(drive, cfg)
    lam = np.asarray(lambda_nm, dtype=float)
    theta, a = phase_amplitude(cfg, resp, lam, volts)
    return transmission_from_phase(theta, a, cfg.self_coupling)


def wavelength_grid(start_nm: float, stop_nm: float, step_nm: float) -> np.ndarray:
    """Inclusive uniform grid from start to stop; a single point when equal."""
    if step_nm <= 0:
        raise ValueError("step must be positive")
    if stop_nm < start_nm:
        raise ValueError("stop must not precede start")
    n = int(math.floor((stop_nm - start_nm) / step_nm + 1e-9)) + 1
    return start_nm + step_nm * np.arange(n)


def spectrum(cfg, resp, lambda_start: float, lambda_stop: float, step: float, drive):
    """Transmission spectrum on an inclusive uniform grid, ascending order."""
    lam = wavelength_grid(lambda_start, lambda_stop, step)
    t = transmission_grid(cfg, resp, lam, drive)
    return [SpectrumPoint(float(l), float(v)) for l, v in zip(lam, np.atleast_1d(t))]


def _golden_min(f, lo: float, hi: float, xtol: float) -> float:
    """Golden-section minimum of unimodal f on [lo, hi] to absolute xtol."""
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def anti_resonance_level(cfg: RingConfig, resp: ElectroOpticResponse, drive) -> float:
    """Transmission at anti-resonance for this drive: ((sigma+a)/(1+sigma a))^2."""
    volts = as_voltages(drive, cfg)
    _, a = phase_amplitude(cfg, resp, resp.lambda_ref_nm, volts)
    s = cfg.self_coupling
    return float(((s + a) / (1.0 + s * a)) ** 2)


def find_resonance(
    cfg: RingConfig,
    resp: ElectroOpticResponse,
    drive,
    window,
    coarse_step_nm: float = 0.002,
    xtol_nm: float = 1e-9,
) -> ResonanceInfo:
    """Locate the single transmission minimum inside ``window`` = (lo, hi) nm.

    Coarse scan brackets the dip, golden-section refines it well below the
    1e-6 nm contract, FWHM comes from the half-depth crossings between the
    dip floor and the anti-resonance level.
    """
    lo, hi = float(window[0]), float(window[1])
    if not hi > lo:
        raise ValueError("window must satisfy lo < hi")
    n = max(201, int(math.ceil((hi - lo) / coarse_step_nm)) + 1)
    lam = np.linspace(lo, hi, n)
    t = np.asarray(transmission_grid(cfg, resp, lam, drive))

    interior = np.where((t[1:-1] < t[:-2]) & (t[1:-1] <= t[2:]))[0] + 1
    if interior.size == 0:
        raise ResonanceSearchError(
            f"no transmission minimum inside window [{lo:g}, {hi:g}] nm"
        )
    if interior.size > 1:
        locs = ", ".join(f"{lam[i]:.6f}" for i in interior)
        raise ResonanceSearchError(
            f"window [{lo:g}, {hi:g}] nm contains several minima near {locs} nm"
        )
    i = int(interior[0])

    def tf(x: float) -> float:
        return float(transmission_grid(cfg, resp, x, drive))

    lam_res = _golden_min(tf, lam[i - 1], lam[i + 1], xtol_nm)
    t_res = tf(lam_res)

    base = anti_resonance_level(cfg, resp, drive)
    t_half = 0.5 * (t_res + base)

    def cross(side_lo: float, side_hi: float) -> float:
        return brentq(lambda x: tf(x) - t_half, side_lo, side_hi, xtol=xtol_nm)

    # walk outward until the half level is exceeded on each side
    step = max(coarse_step_nm, 4.0 * xtol_nm)
    left = lam_res - step
    while left > lo and tf(left) < t_half:
        left -= step
    right = lam_res + step
    while right < hi and tf(right) < t_half:
        right += step
    if tf(max(left, lo)) < t_half or tf(min(right, hi)) < t_half:
        raise ResonanceSearchError(
            "window too narrow to reach the half-depth level on both sides"
        )
    lam_lo = cross(max(left, lo), lam_res)
    lam_hi = cross(lam_res, min(right, hi))
    fwhm = lam_hi - lam_lo

    extinction = math.inf if t_res <= 0 else -10.0 * math.log10(t_res)
    return ResonanceInfo(
        lambda_res_nm=float(lam_res),
        fwhm_nm=float(fwhm),
        extinction_db=float(extinction),
        q_factor=float(lam_res / fwhm),
    )


def measure_fsr(
    cfg: RingConfig,
    resp: ElectroOpticResponse,
    drive,
    lambda_start_nm: float,
) -> float:
    """Spacing of the two consecutive resonances above ``lambda_start_nm``."""
    lam0 = float(lambda_start_nm)
    fsr_est = lam0 * lam0 / (cfg.group_index * cfg.circumference_nm)
    span = 2.4 * fsr_est
    lam = np.linspace(lam0, lam0 + span, 4001)
    t = np.asarray(transmission_grid(cfg, resp, lam, drive))
    interior = np.where((t[1:-1] < t[:-2]) & (t[1:-1] <= t[2:]))[0] + 1
    if interior.size < 2:
        raise ResonanceSearchError("fewer than two resonances above start wavelength")
    res = []
    # window wide enough to reach half depth yet well inside one FSR
    half_win = 0.2 * fsr_est
    for i in interior[:2]:
        win = (float(lam[i]) - half_win, float(lam[i]) + half_win)
        res.append(find_resonance(cfg, resp, drive, win))
    return res[1].lambda_res_nm - res[0].lambda_res_nm


def check_over_coupling(cfg: RingConfig, resp: ElectroOpticResponse) -> None:
    """Warn when the ring is not over-coupled at 0 V (sigma >= a)."""
    from .device import amplitude_at_zero

    a0 = amplitude_at_zero(cfg, resp)
    if cfg.self_coupling >= a0:
        warnings.warn(
            f"self_coupling {cfg.self_coupling:.6f} >= zero-drive round-trip "
            f"amplitude {a0:.6f}: ring is not over-coupled",
            UserWarning,
            stacklevel=2,
        )
