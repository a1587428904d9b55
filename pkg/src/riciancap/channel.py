"""Separately-correlated Rician channel descriptions and normalizations."""

from dataclasses import dataclass, replace
import math

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import InvalidAlpha, ZeroLos, ZeroTrace
from .linalg import as_matrix, check_hermitian, hermitian_part, hermitian_sqrt, max_singular_value


def db_to_linear(x_db: float) -> float:
    """10**(x/10); the -inf sentinel maps to exactly 0."""
    if x_db == -math.inf:
        return 0.0
    return 10.0 ** (x_db / 10.0)


@dataclass(frozen=True, eq=False)
class ChannelSpec:
    """Deterministic part of H = H_bar + R^{1/2} H_w T^{1/2}.

    `snr_db` and `rice_k_db` are in dB; ``rice_k_db = -inf`` is Rayleigh.
    """

    h_bar: NDArray[np.complex128]
    t_corr: NDArray[np.complex128]
    r_corr: NDArray[np.complex128]
    snr_db: float
    rice_k_db: float

    def __post_init__(self):
        h = as_matrix(self.h_bar)
        t = check_hermitian(self.t_corr)
        r = check_hermitian(self.r_corr)
        if t.shape[0] != h.shape[1] or r.shape[0] != h.shape[0]:
            raise ValueError(
                f"shape mismatch: h_bar {h.shape}, t_corr {t.shape}, r_corr {r.shape}"
            )
        object.__setattr__(self, "h_bar", h)
        object.__setattr__(self, "t_corr", t)
        object.__setattr__(self, "r_corr", r)

    @property
    def n_t(self) -> int:
        return self.h_bar.shape[1]

    @property
    def n_r(self) -> int:
        return self.h_bar.shape[0]

    @property
    def rho(self) -> float:
        return db_to_linear(self.snr_db)

    @property
    def rice_k(self) -> float:
        return db_to_linear(self.rice_k_db)


@dataclass(frozen=True, eq=False)
class EffectiveChannel:
    """(H_tilde, T_tilde, R) with the input covariance absorbed."""

    h_tilde: NDArray[np.complex128]
    t_tilde: NDArray[np.complex128]
    r_corr: NDArray[np.complex128]

    @property
    def n_t(self) -> int:
        return self.h_tilde.shape[1]

    @property
    def n_r(self) -> int:
        return self.h_tilde.shape[0]

    def rice_k(self) -> float:
        """Covariance-dependent Rice factor ||H~||^2 / (Tr R Tr T~).

        Informational only; normalization always uses the covariance-free
        definition.
        """
        denom = np.trace(self.r_corr).real * np.trace(self.t_tilde).real
        if denom == 0.0:
            raise ZeroTrace("Tr(R) * Tr(T~) is zero")
        return float(np.linalg.norm(self.h_tilde) ** 2 / denom)


def exponential_correlation(dim: int, alpha: float) -> NDArray[np.complex128]:
    """Exponential correlation matrix with entries alpha**|i-j|."""
    if not 0.0 <= alpha < 1.0:
        raise InvalidAlpha(f"alpha must lie in [0, 1), got {alpha}")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    idx = np.arange(dim)
    # 0**0 == 1 keeps the diagonal right for alpha = 0.
    return np.power(float(alpha), np.abs(idx[:, None] - idx[None, :])).astype(np.complex128)


def uniform_los(n_r: int, n_t: int) -> NDArray[np.complex128]:
    """All-ones rank-one LOS matrix (before Rice-factor scaling)."""
    if n_r < 1 or n_t < 1:
        raise ValueError("antenna counts must be >= 1")
    return np.ones((n_r, n_t), dtype=np.complex128)


def normalize_spec(spec: ChannelSpec) -> ChannelSpec:
    """Scale correlations to Tr(T) = n_t, Tr(R) = n_r and H_bar to match K.

    After normalization ``||H_bar||^2 = K Tr(R) Tr(T) = K n_r n_t``.
    """
    tr_t = np.trace(spec.t_corr).real
    tr_r = np.trace(spec.r_corr).real
    if tr_t <= 0.0:
        raise ZeroTrace("transmit correlation has zero trace")
    if tr_r <= 0.0:
        raise ZeroTrace("receive correlation has zero trace")
    t = spec.t_corr if tr_t == spec.n_t else spec.t_corr * (spec.n_t / tr_t)
    r = spec.r_corr if tr_r == spec.n_r else spec.r_corr * (spec.n_r / tr_r)

    k = spec.rice_k
    if k == 0.0:
        h = np.zeros_like(spec.h_bar)
    else:
        energy = np.linalg.norm(spec.h_bar) ** 2
        if energy == 0.0:
            raise ZeroLos("K > 0 requires a nonzero LOS matrix")
        target = k * spec.n_r * spec.n_t
        h = spec.h_bar if energy == target else spec.h_bar * math.sqrt(target / energy)
    return replace(spec, h_bar=h, t_corr=t, r_corr=r)


def scalar_covariance(spec: ChannelSpec) -> NDArray[np.complex128]:
    """Q = q I with q = rho n_r / ((K+1) Tr(R) Tr(T))."""
    tr_t = np.trace(spec.t_corr).real
    tr_r = np.trace(spec.r_corr).real
    q = spec.rho * spec.n_r / ((spec.rice_k + 1.0) * tr_r * tr_t)
    return q * np.eye(spec.n_t, dtype=np.complex128)


def _scalar_value(q: NDArray) -> float | None:
    d = np.diagonal(q)
    if np.count_nonzero(q - np.diag(d)) == 0 and np.all(d == d[0]) and d[0].imag == 0.0:
        return float(d[0].real)
    return None


def effective_channel(spec: ChannelSpec, q: ArrayLike) -> EffectiveChannel:
    """Absorb the input covariance: H~ = H_bar Q^{1/2}, T~ = Q^{1/2} T Q^{1/2}."""
    qm = check_hermitian(q)
    if qm.shape != (spec.n_t, spec.n_t):
        raise ValueError(f"covariance must be {spec.n_t}x{spec.n_t}, got {qm.shape}")
    scalar = _scalar_value(qm)
    if scalar is not None:
        if scalar < 0.0:
            raise ValueError("scalar covariance must be nonnegative")
        return EffectiveChannel(
            h_tilde=spec.h_bar * math.sqrt(scalar),
            t_tilde=spec.t_corr * scalar,
            r_corr=spec.r_corr,
        )
    q_half = hermitian_sqrt(qm)
    return EffectiveChannel(
        h_tilde=spec.h_bar @ q_half,
        t_tilde=hermitian_part(q_half @ spec.t_corr @ q_half),
        r_corr=spec.r_corr,
    )


def gaussianity_diagnostics(eff: EffectiveChannel) -> tuple[float, float]:
    """Eigenmode dominance ratios sigma_max(M) / (Tr(M)/n) for R and T~.

    Both ratios lie in [1, n]; values close to n mean a single eigenmode
    carries almost all the power.  Finite-n heuristic only.
    """
    tr_r = np.trace(eff.r_corr).real
    tr_t = np.trace(eff.t_tilde).real
    if tr_r <= 0.0:
        raise ZeroTrace("Tr(R) is zero")
    if tr_t <= 0.0:
        raise ZeroTrace("Tr(T~) is zero")
    dom_r = max_singular_value(eff.r_corr) / (tr_r / eff.n_r)
    dom_t = max_singular_value(eff.t_tilde) / (tr_t / eff.n_t)
    return float(dom_r), float(dom_t)


def dominance_warning(dom: float, n: int, threshold: float = 0.75) -> bool:
    """True when a dominance ratio sits in the top quarter of its range."""
    return n >= 2 and dom >= threshold * n


def baseline_spec(
    n_r: int = 4,
    n_t: int = 4,
    rice_k_db: float = 10.0,
    alpha: float = 0.0,
    snr_db: float = 10.0,
) -> ChannelSpec:
    """Normalized all-ones-LOS, exponential-correlation scenario."""
    spec = ChannelSpec(
        h_bar=uniform_los(n_r, n_t),
        t_corr=exponential_correlation(n_t, alpha),
        r_corr=exponential_correlation(n_r, alpha),
        snr_db=snr_db,
        rice_k_db=rice_k_db,
    )
    return normalize_spec(spec)
