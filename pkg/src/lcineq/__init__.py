"""Sharp moment and norm bounds for decreasing log-concave and s-concave functions."""

from .bounds import (
    BoundReport,
    NotApplicableError,
    bk_lower,
    check_bk,
    check_hensley,
    check_power,
    check_upper_lc,
    check_upper_sc,
    check_weighted,
    entropy_upper_check,
    hensley_lower,
    hensley_upper,
    pnorm_threshold,
    pnorm_threshold_certificate,
    pnorm_upper_check,
    power_lower,
    sconcave_threshold,
    upper_logconcave,
    upper_sconcave,
    weighted_classical,
    weighted_lower,
)
from .extremal import (
    K_u,
    K_u_domain,
    ReductionError,
    objective_upper_lc,
    objective_upper_sc,
    reduce_lower,
    reduce_upper_logconcave,
    reduce_upper_sconcave,
    sweep,
)
from .measures import (
    DEFAULT_QUADRATURE,
    LEBESGUE,
    DivergentIntegralError,
    DomainError,
    QuadratureConfig,
    WeightedMeasure,
    cdf_Phi,
    integrate,
    inverse_cdf_Phi,
    inverse_incomplete_G,
    lower_incomplete_F,
)
from .profiles import (
    BallSection,
    ConvexWeight,
    DecreasingProfile,
    HalfGaussian,
    Indicator,
    LogConcaveSampled,
    PlateauExponential,
    PlateauPower,
    SConcaveSampled,
    TruncatedExponential,
    is_valid,
    mass,
    profile_from_dict,
    profile_from_json,
    random_logconcave,
    random_sconcave,
    stats,
    weighted_moment,
)

__version__ = "0.1.0"
