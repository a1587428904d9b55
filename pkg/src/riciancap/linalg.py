"""Dense complex-Hermitian linear algebra kernels.

Everything downstream (channel normalization, resolvents, Monte-Carlo
mutual information) goes through these few routines so that Hermitian
checks, PSD clamping and log-domain determinants behave the same way
everywhere.
"""

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg as sla

from .errors import NotHermitian, NotPositiveDefinite, NotPSD

HERMITIAN_RTOL = 1e-12
PSD_CLAMP = 1e-10


def as_matrix(m: ArrayLike) -> NDArray[np.complex128]:
    """Coerce to a finite 2-D complex array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"expected a nonempty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def hermitian_part(m: ArrayLike) -> NDArray[np.complex128]:
    a = np.asarray(m, dtype=np.complex128)
    return 0.5 * (a + np.swapaxes(a, -1, -2).conj())


def check_hermitian(m: ArrayLike, rtol: float = HERMITIAN_RTOL) -> NDArray[np.complex128]:
    """Return `m` as a complex array, raising NotHermitian if M != M^H."""
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise NotHermitian(f"matrix is not square: {a.shape}")
    scale = np.linalg.norm(a)
    if np.linalg.norm(a - a.conj().T) > rtol * scale:
        raise NotHermitian("matrix differs from its conjugate transpose")
    return a


def hermitian_sqrt(m: ArrayLike) -> NDArray[np.complex128]:
    """Principal square root of a Hermitian PSD matrix.

    Uses the unitary eigendecomposition ``m = U diag(lam) U^H`` and returns
    ``U diag(sqrt(lam)) U^H``.  Eigenvalues in ``[-1e-10 * lam_max, 0)`` are
    rounding noise and are clamped to zero; anything more negative raises
    NotPSD.
    """
    a = check_hermitian(m)
    lam, u = np.linalg.eigh(hermitian_part(a))
    lam_max = max(float(lam[-1]), 0.0)
    if lam[0] < -PSD_CLAMP * lam_max or (lam_max == 0.0 and lam[0] < 0.0):
        raise NotPSD(f"smallest eigenvalue {lam[0]:.3e} is negative")
    root = np.sqrt(np.clip(lam, 0.0, None))
    s = (u * root) @ u.conj().T
    return hermitian_part(s)


def _cholesky(m: NDArray) -> NDArray:
    try:
        return np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("Cholesky factorization hit a nonpositive pivot") from exc


def logdet_hpd(m: ArrayLike) -> float | NDArray[np.float64]:
    """ln det of a Hermitian positive definite matrix via Cholesky.

    Accepts a single matrix or a stack of shape ``(..., n, n)``; stacks
    return an array of log-determinants.
    """
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim == 2:
        a = check_hermitian(a)
    elif a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {a.shape}")
    # LAPACK reads only one triangle; symmetrize so both agree.
    chol = _cholesky(hermitian_part(a))
    diag = np.diagonal(chol, axis1=-2, axis2=-1).real
    out = 2.0 * np.log(diag).sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def solve_hpd(m: ArrayLike, rhs: ArrayLike) -> NDArray[np.complex128]:
    """Solve ``m X = rhs`` for Hermitian positive definite `m`."""
    a = check_hermitian(m)
    b = np.asarray(rhs, dtype=np.complex128)
    vector = b.ndim == 1
    if vector:
        b = b[:, None]
    if b.shape[0] != a.shape[0]:
        raise ValueError(f"rhs has {b.shape[0]} rows, matrix has dim {a.shape[0]}")
    try:
        factor = sla.cho_factor(hermitian_part(a), lower=True, check_finite=False)
    except sla.LinAlgError as exc:
        raise NotPositiveDefinite("Cholesky factorization hit a nonpositive pivot") from exc
    x = sla.cho_solve(factor, b, check_finite=False)
    return x[:, 0] if vector else x


def max_singular_value(m: ArrayLike) -> float:
    """Largest singular value (spectral norm)."""
    a = as_matrix(m)
    return float(np.linalg.svd(a, compute_uv=False)[0])


def is_psd(m: ArrayLike) -> bool:
    """PSD test by attempted factorization of ``m + eps * lam_max * I``."""
    a = check_hermitian(m)
    shift = PSD_CLAMP * max(np.abs(a).max(), 1e-300)
    try:
        np.linalg.cholesky(hermitian_part(a) + shift * np.eye(a.shape[0]))
    except np.linalg.LinAlgError:
        return False
    return True
