"""Asymptotic mutual-information statistics of Kronecker-correlated Rician MIMO channels."""

from .channel import (
    ChannelSpec,
    EffectiveChannel,
    baseline_spec,
    effective_channel,
    exponential_correlation,
    gaussianity_diagnostics,
    normalize_spec,
    scalar_covariance,
    uniform_los,
)
from .montecarlo import McConfig, McEstimate, empirical_outage, estimate, mutual_information, sample_channel
from .outage import outage_probability, outage_rate, q_function, q_inverse
from .replica import (
    AsymptoticStats,
    FixedPoint,
    analyze,
    asymptotic_stats,
    fixed_point_map,
    resolvents,
    solve_fixed_point,
)
from .waterfill import WaterfillingSolution, los_eigenmodes, optimize_uncorrelated, waterfill_powers

__version__ = "0.1.0"
