"""Fixed-point water-filling for the spatially uncorrelated Rician channel.

With T = R = I the optimal covariance shares its eigenvectors with
H_bar^H H_bar, so only the eigen-domain powers q_i need optimizing.  At a
fixed replica pair (w, z) the asymptotic mean is

    n_r ln(1+w) + sum_i ln[1 + (z + lam_i/(1+w)) q_i] - w z

and its maximizer under sum_i q_i = P is the water-filling solution with
floors (1+w) / (z(1+w) + lam_i).  Because the mean is stationary in (w, z),
alternating "solve (w, z)" and "re-water-fill" converges to the optimum.
"""

from dataclasses import dataclass
import math

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .channel import ChannelSpec, EffectiveChannel
from .errors import NoConvergence, NotUncorrelated
from .replica import solve_fixed_point

DAMPING_FLOOR = 1.0 / 64.0


@dataclass(frozen=True, eq=False)
class WaterfillingSolution:
    q_bar_diag: NDArray[np.float64]
    xi: float
    w: float
    z: float
    capacity_nats: float
    outer_iterations: int
    eigvals: NDArray[np.float64]
    eigvecs: NDArray[np.complex128]

    @property
    def covariance(self) -> NDArray[np.complex128]:
        """Q = U diag(q) U^H in the antenna domain."""
        u = self.eigvecs
        return (u * self.q_bar_diag) @ u.conj().T


def los_eigenmodes(h_bar: ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.complex128]]:
    """Eigenvalues (descending) and eigenvectors (columns) of H_bar^H H_bar."""
    h = np.asarray(h_bar, dtype=np.complex128)
    if not np.any(h):
        n_t = h.shape[1]
        return np.zeros(n_t), np.eye(n_t, dtype=np.complex128)
    lam, u = np.linalg.eigh(h.conj().T @ h)
    order = np.argsort(lam, kind="stable")[::-1]
    lam = lam[order]
    # rounding noise on null modes would break exact ties
    lam[lam < 1e-12 * lam[0]] = 0.0
    return lam, u[:, order]


def waterfill_powers(
    eigvals: ArrayLike, w: float, rho: float, z: float = 1.0
) -> tuple[NDArray[np.float64], float]:
    """Powers q_i = (xi - (1+w)/(z(1+w) + lam_i))_+ with sum q_i = rho.

    The level xi is found exactly: sort the floors and take the largest
    active set whose implied level clears every active floor.  ``z = 1``
    gives the classical floors (1+w)/(1+w+lam_i).
    """
    lam = np.asarray(eigvals, dtype=np.float64)
    if np.any(lam < 0.0):
        raise ValueError("eigenvalues must be nonnegative")
    if rho <= 0.0:
        raise ValueError("total power must be positive")
    floors = (1.0 + w) / (z * (1.0 + w) + lam)
    if np.all(floors == floors[0]):
        return np.full(lam.size, rho / lam.size), float(floors[0] + rho / lam.size)
    order = np.argsort(floors, kind="stable")
    sorted_floors = floors[order]
    levels = (rho + np.cumsum(sorted_floors)) / np.arange(1, lam.size + 1)
    # k active modes are consistent iff the level exceeds the k-th floor.
    active = int(np.nonzero(levels > sorted_floors)[0][-1]) + 1
    xi = float(levels[active - 1])
    q = np.maximum(xi - floors, 0.0)
    return q, xi


def uncorrelated_mean(eigvals: NDArray, q: NDArray, w: float, z: float, n_r: int) -> float:
    """Asymptotic mean in the eigen domain of H_bar^H H_bar."""
    gains = z + eigvals / (1.0 + w)
    return n_r * math.log1p(w) + float(np.sum(np.log1p(gains * q))) - w * z


def _eigen_channel(h_bar, u, q) -> EffectiveChannel:
    cov = (u * q) @ u.conj().T
    q_half = (u * np.sqrt(q)) @ u.conj().T
    n_r = h_bar.shape[0]
    return EffectiveChannel(
        h_tilde=h_bar @ q_half,
        t_tilde=0.5 * (cov + cov.conj().T),
        r_corr=np.eye(n_r, dtype=np.complex128),
    )


def _is_identity(m: NDArray, tol: float = 1e-12) -> bool:
    return np.linalg.norm(m - np.eye(m.shape[0])) <= tol * math.sqrt(m.shape[0])


def optimize_uncorrelated(
    spec: ChannelSpec,
    tol: float = 1e-10,
    max_outer: int = 500,
    power: float | None = None,
) -> WaterfillingSolution:
    """Ergodic-capacity-achieving covariance for T = R = I.

    `power` is the trace budget for Q; it defaults to the linear SNR.
    """
    if not (_is_identity(spec.t_corr) and _is_identity(spec.r_corr)):
        raise NotUncorrelated("water-filling optimizer needs T = I and R = I")
    budget = spec.rho if power is None else float(power)
    if budget <= 0.0:
        raise ValueError("total power must be positive")

    lam, u = los_eigenmodes(spec.h_bar)
    n_t, n_r = spec.n_t, spec.n_r

    def evaluate(q):
        fp = solve_fixed_point(_eigen_channel(spec.h_bar, u, q))
        return fp.w, fp.z

    # Damped outer iteration: mix toward the water-filling allocation and
    # halve the step whenever the allocation residual grows.  Convex mixes
    # of feasible allocations stay feasible.
    q = np.full(n_t, budget / n_t)
    w, z = evaluate(q)
    eta, prev = 1.0, math.inf
    for it in range(1, max_outer + 1):
        target, _ = waterfill_powers(lam, w, budget, z)
        resid = float(np.max(np.abs(target - q)))
        if resid < tol:
            q, xi = waterfill_powers(lam, w, budget, z)
            cap = uncorrelated_mean(lam, q, w, z, n_r)
            return WaterfillingSolution(
                q_bar_diag=q, xi=xi, w=w, z=z, capacity_nats=cap,
                outer_iterations=it, eigvals=lam, eigvecs=u,
            )
        if resid > prev:
            eta = max(0.5 * eta, DAMPING_FLOOR)
        prev = resid
        q = target if eta == 1.0 else (1.0 - eta) * q + eta * target
        w, z = evaluate(q)
    raise NoConvergence(max_outer, "fixed-point water-filling")
