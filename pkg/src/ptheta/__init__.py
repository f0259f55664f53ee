"""Partial theta function: certified evaluation, zeros, spectra, and bounds."""

__version__ = "0.1.0"

from .errors import (
    ConvergenceError,
    CountMismatchError,
    DomainError,
    PrecisionBudgetError,
)
from .evaluate import (
    FIRST_NEGATIVE_SPECTRAL_Q,
    FIRST_POSITIVE_SPECTRAL_Q,
    SECOND_POSITIVE_SPECTRAL_Q,
    EvalOutput,
    QParam,
    TripleProductFactors,
    g_bound,
    tail_g,
    theta,
    theta_star,
    truncation_degree,
)
from .zeros import (
    Zero,
    ZeroSet,
    annulus_index,
    classify_zeros,
    count_zeros_in_circle,
    disk_radius,
    find_zeros_in_disk,
    taylor_coefficients,
)
from .spectrum import (
    CcpTrajectory,
    SpectralValue,
    census_disk_index,
    count_ccps,
    find_spectral_value,
    track_ccp,
)
from .bounds import (
    ALPHA0,
    FactorComparison,
    Lemma1Report,
    LineCheckReport,
    LineSpec,
    b_is_increasing,
    b_n,
    check_line,
    ell,
    factor_comparison,
    gamma_is_decreasing,
    gamma_n,
    lemma1_chain,
    line_abscissa,
)
from .regions import (
    RegionReport,
    RegionSpec,
    theorem_region,
    verify_containment,
)
