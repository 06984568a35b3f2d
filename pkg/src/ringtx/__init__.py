"""Segmented silicon micro-ring modulator PAM-4 transmitter toolkit."""

from .device import (
    DriveState,
    ElectroOpticResponse,
    RingConfig,
    interpolate_response,
    load_response_csv,
    load_ring_config,
    round_trip,
    save_response_csv,
)
from .errors import (
    DegenerateLevelsError,
    DomainError,
    EmptyWindowError,
    InsufficientDataError,
    MetricDomainError,
    ResonanceSearchError,
    VoltageRangeError,
)
from .pam import (
    BinaryEncoding,
    LinearityMetrics,
    PamLevels,
    ThermometerEncoding,
    er,
    il,
    levels_for,
    linearity_metrics,
    rlm,
    tp,
)
from .ring import (
    ResonanceInfo,
    SpectrumPoint,
    find_resonance,
    measure_fsr,
    spectrum,
    transmission,
    wavelength_grid,
)
from .search import (
    RangeReport,
    SolveResult,
    VoltageBounds,
    best_rlm_two_segment,
    il_tuning_range,
    linear_range,
    solve_three_segment,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
