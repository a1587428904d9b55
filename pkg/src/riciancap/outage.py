"""Gaussian outage approximation on top of the asymptotic mean/variance."""

import math
from statistics import NormalDist

from .errors import OutOfRange
from .replica import AsymptoticStats

_STD_NORMAL = NormalDist()


def q_function(x: float) -> float:
    """Upper-tail probability P(N(0,1) > x)."""
    if math.isnan(x):
        raise ValueError("q_function of NaN")
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def q_inverse(p: float) -> float:
    """x such that q_function(x) = p, for 0 < p < 1."""
    if not 0.0 < p < 1.0:
        raise OutOfRange(f"probability must lie in (0, 1), got {p}")
    # Q^{-1}(p) = -Phi^{-1}(p); this side stays accurate for small p.
    return -_STD_NORMAL.inv_cdf(p)


def outage_rate(stats: AsymptoticStats, epsilon: float) -> float:
    """Outage mutual information mu - sigma * Q^{-1}(epsilon), in nats.

    Can be negative for extreme epsilon at low SNR; returned unclamped.
    """
    if not 0.0 < epsilon < 1.0:
        raise OutOfRange(f"epsilon must lie in (0, 1), got {epsilon}")
    return stats.mean_nats - stats.std_nats * q_inverse(epsilon)


def outage_probability(stats: AsymptoticStats, rate_nats: float) -> float:
    """P(N(mu, sigma^2) < rate)."""
    sigma = stats.std_nats
    if sigma == 0.0:
        return 1.0 if rate_nats > stats.mean_nats else 0.0
    return q_function((stats.mean_nats - rate_nats) / sigma)
