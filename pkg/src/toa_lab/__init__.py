"""Quantum time-of-arrival distributions for a free Gaussian packet."""

from .distributions import (
    DistributionKind,
    SampledDistribution,
    TimeGrid,
    qc_normalization_constant,
    sample,
    sample_flux,
    sample_kijowski,
    sample_qc,
    sample_semiclassical,
)
from .errors import (
    ConfigError,
    DegenerateNormalizationError,
    DomainTooSmallError,
    InvalidParameterError,
    UndefinedMapError,
    UnsupportedScenarioError,
)
from .oracle import GridState, discretize, spectral_propagate
from .packets import (
    NATURAL_UNITS,
    DetectorSpec,
    ObservationWindow,
    UnitSystem,
    WavePacketSpec,
    make_gaussian,
    psi_momentum,
    psi_position,
)
from .tails import (
    ClassicalScenario,
    ComparisonReport,
    TailCurve,
    classical_found_probability,
    classical_not_found_probability,
    compare_tails,
    qc_not_found_probability,
    tail_curve,
)

__version__ = "0.1.0"
