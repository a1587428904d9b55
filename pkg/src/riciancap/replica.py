"""Replica fixed point (w, z) and the asymptotic mean/variance of I(H).

The pair (w, z) solves

    w = Tr(D1 T~),    z = Tr(A1 R)

with the resolvents

    A1 = [I + wR + H~ (I + zT~)^{-1} H~^H]^{-1}
    D1 = [I + zT~ + H~^H (I + wR)^{-1} H~]^{-1}
    C1 = (I + zT~)^{-1} H~^H A1,   B1 = -C1^H.

These forms never invert T~ or R, so singular correlations and
rank-deficient covariances are fine.  The solution is unique, which lets us
cross-check a damped Picard iteration against a nested bracketing solve.
"""

from dataclasses import dataclass
import math

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import brentq

from .channel import EffectiveChannel
from .errors import NoConvergence, StabilityViolation
from .linalg import hermitian_part, hermitian_sqrt, logdet_hpd, solve_hpd

STABILITY_SLACK = 1e-12
DAMPING_FLOOR = 1.0 / 64.0


@dataclass(frozen=True)
class FixedPoint:
    w: float
    z: float
    residual_w: float
    residual_z: float
    iterations: int
    method: str  # "damped-picard", "nested-bisection" or "zero-power"


@dataclass(frozen=True, eq=False)
class ResolventSet:
    a1: NDArray[np.complex128]
    d1: NDArray[np.complex128]
    c1: NDArray[np.complex128]

    @property
    def b1(self) -> NDArray[np.complex128]:
        return -self.c1.conj().T


@dataclass(frozen=True)
class AsymptoticStats:
    mean_nats: float
    variance_nats2: float
    alpha: float
    beta: float
    gamma: float
    stability_margin: float

    @property
    def std_nats(self) -> float:
        return math.sqrt(self.variance_nats2)


def resolvents(eff: EffectiveChannel, w: float, z: float) -> ResolventSet:
    if w < 0.0 or z < 0.0:
        raise ValueError(f"resolvents need w, z >= 0 (got w={w}, z={z})")
    h = eff.h_tilde
    eye_r = np.eye(eff.n_r, dtype=np.complex128)
    eye_t = np.eye(eff.n_t, dtype=np.complex128)
    tx = eye_t + z * eff.t_tilde
    rx = eye_r + w * eff.r_corr
    # (I + zT~)^{-1} H~^H and (I + wR)^{-1} H~
    tx_h = solve_hpd(tx, h.conj().T)
    rx_h = solve_hpd(rx, h)
    a1 = solve_hpd(hermitian_part(rx + h @ tx_h), eye_r)
    d1 = solve_hpd(hermitian_part(tx + h.conj().T @ rx_h), eye_t)
    return ResolventSet(a1=hermitian_part(a1), d1=hermitian_part(d1), c1=tx_h @ a1)


def _tr_w(eff: EffectiveChannel, w: float, z: float) -> float:
    """Tr(D1 T~) without forming A1 or C1."""
    h = eff.h_tilde
    rx_h = solve_hpd(np.eye(eff.n_r) + w * eff.r_corr, h)
    m = hermitian_part(np.eye(eff.n_t) + z * eff.t_tilde + h.conj().T @ rx_h)
    return float(np.trace(solve_hpd(m, eff.t_tilde)).real)


def _tr_z(eff: EffectiveChannel, w: float, z: float) -> float:
    """Tr(A1 R) without forming D1 or C1."""
    h = eff.h_tilde
    tx_h = solve_hpd(np.eye(eff.n_t) + z * eff.t_tilde, h.conj().T)
    m = hermitian_part(np.eye(eff.n_r) + w * eff.r_corr + h @ tx_h)
    return float(np.trace(solve_hpd(m, eff.r_corr)).real)


def fixed_point_map(eff: EffectiveChannel, w: float, z: float) -> tuple[float, float]:
    """One application of (w, z) -> (Tr(D1 T~), Tr(A1 R))."""
    res = resolvents(eff, w, z)
    w_next = float(np.trace(res.d1 @ eff.t_tilde).real)
    z_next = float(np.trace(res.a1 @ eff.r_corr).real)
    return w_next, z_next


def _converged(w, z, rw, rz, tol) -> bool:
    return max(abs(rw), abs(rz)) <= tol * (1.0 + w + z)


def _zero_power(eff: EffectiveChannel) -> FixedPoint:
    z = _tr_z(eff, 0.0, 0.0)
    return FixedPoint(0.0, z, 0.0, 0.0, 0, "zero-power")


def _picard(eff, tol, max_iter, w0, z0):
    w, z = w0, z0
    eta = 1.0
    prev = math.inf
    for it in range(1, max_iter + 1):
        fw, fz = fixed_point_map(eff, w, z)
        rw, rz = w - fw, z - fz
        if _converged(w, z, rw, rz, tol):
            return FixedPoint(w, z, rw, rz, it, "damped-picard")
        norm = max(abs(rw), abs(rz))
        if norm > prev:
            eta = max(eta / 2.0, DAMPING_FLOOR)
        prev = norm
        w = max((1.0 - eta) * w + eta * fw, 0.0)
        z = max((1.0 - eta) * z + eta * fz, 0.0)
    return None


def _bisect(eff: EffectiveChannel, tol: float) -> FixedPoint:
    tr_t = float(np.trace(eff.t_tilde).real)
    tr_r = float(np.trace(eff.r_corr).real)
    count = 0

    # D1, A1 <= I, so Tr(D1 T~) <= Tr(T~) and Tr(A1 R) <= Tr(R) bracket both roots.
    def g(z: float) -> float:
        nonlocal count

        def f(w):
            nonlocal count
            count += 1
            return _tr_w(eff, w, z) - w

        if f(tr_t) >= 0.0:
            return tr_t
        return brentq(f, 0.0, tr_t, xtol=1e-300, rtol=4.0 * np.finfo(float).eps, maxiter=500)

    def h(z: float) -> float:
        return _tr_z(eff, g(z), z) - z

    if tr_r == 0.0:
        z = 0.0
    elif h(tr_r) >= 0.0:
        z = tr_r
    else:
        z = brentq(h, 0.0, tr_r, xtol=1e-300, rtol=4.0 * np.finfo(float).eps, maxiter=500)
    w = g(z)
    fw, fz = fixed_point_map(eff, w, z)
    fp = FixedPoint(w, z, w - fw, z - fz, count, "nested-bisection")
    if not _converged(w, z, fp.residual_w, fp.residual_z, tol):
        raise NoConvergence(count, f"bisection residuals ({fp.residual_w:.3e}, {fp.residual_z:.3e})")
    return fp


def solve_fixed_point(
    eff: EffectiveChannel,
    tol: float = 1e-12,
    max_iter: int = 10000,
    method: str = "auto",
) -> FixedPoint:
    """Unique nonnegative solution of the replica fixed-point equations.

    ``method="auto"`` runs damped Picard iteration from ``(Tr T~, Tr R)``
    and falls back to nested bisection after ``max_iter // 2`` steps.
    ``"picard"`` and ``"bisection"`` force one route (used for
    cross-checking).
    """
    if method not in ("auto", "picard", "bisection"):
        raise ValueError(f"unknown method {method!r}")
    if np.trace(eff.t_tilde).real <= 0.0:
        return _zero_power(eff)
    if method == "bisection":
        return _bisect(eff, tol)
    w0 = float(np.trace(eff.t_tilde).real)
    z0 = float(np.trace(eff.r_corr).real)
    budget = max_iter if method == "picard" else max(max_iter // 2, 1)
    fp = _picard(eff, tol, budget, w0, z0)
    if fp is not None:
        return fp
    if method == "picard":
        raise NoConvergence(max_iter, "damped Picard iteration")
    return _bisect(eff, tol)


def gamma_norm_form(eff: EffectiveChannel, res: ResolventSet) -> float:
    """gamma = 1 - ||T~^{1/2} C1 R^{1/2}||_F^2."""
    m = hermitian_sqrt(eff.t_tilde) @ res.c1 @ hermitian_sqrt(eff.r_corr)
    return 1.0 - float(np.linalg.norm(m) ** 2)


def gamma_trace_form(eff: EffectiveChannel, res: ResolventSet) -> float:
    """gamma = 1 + Tr(B1 T~ C1 R)."""
    return 1.0 + float(np.trace(res.b1 @ eff.t_tilde @ res.c1 @ eff.r_corr).real)


def asymptotic_stats(eff: EffectiveChannel, fp: FixedPoint) -> AsymptoticStats:
    """Asymptotic mean and variance of the mutual information at (w, z).

    The block determinant is split as det(I + wR) * det(D1^{-1}); the Schur
    complement D1^{-1} = I + zT~ + H~^H (I + wR)^{-1} H~ is HPD.
    """
    w, z = fp.w, fp.z
    h = eff.h_tilde
    rx = np.eye(eff.n_r) + w * eff.r_corr
    schur = hermitian_part(np.eye(eff.n_t) + z * eff.t_tilde + h.conj().T @ solve_hpd(rx, h))
    mean = logdet_hpd(rx) + logdet_hpd(schur) - w * z

    res = resolvents(eff, w, z)
    ar = res.a1 @ eff.r_corr
    dt = res.d1 @ eff.t_tilde
    alpha = float(np.trace(ar @ ar).real)
    beta = float(np.trace(dt @ dt).real)
    gamma = gamma_trace_form(eff, res)
    margin = gamma * gamma - alpha * beta
    if not (-STABILITY_SLACK < margin <= 1.0 + STABILITY_SLACK) or margin <= 0.0:
        raise StabilityViolation(
            f"gamma^2 - alpha*beta = {margin!r} outside (0, 1] "
            f"(alpha={alpha}, beta={beta}, gamma={gamma})"
        )
    margin = min(margin, 1.0)
    return AsymptoticStats(
        mean_nats=float(mean),
        variance_nats2=-math.log(margin),
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        stability_margin=margin,
    )


def analyze(eff: EffectiveChannel, tol: float = 1e-12) -> tuple[FixedPoint, AsymptoticStats]:
    """Solve and evaluate in one call."""
    fp = solve_fixed_point(eff, tol=tol)
    return fp, asymptotic_stats(eff, fp)
