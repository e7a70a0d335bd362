"""Dense Hermitian linear algebra on full ``p x p`` complex arrays.

All functions take and return plain :class:`numpy.ndarray` objects. Inputs are
validated for Hermitian symmetry (and positive definiteness where required)
and hermitized before factorization, so that floating-point drift from
accumulated products never reaches LAPACK.
"""
import numpy as np
import scipy.linalg

from .exceptions import ConvergenceFailure, DimMismatch, NotHermitian, NotPositiveDefinite

#: Relative asymmetry tolerance, ``|M - M^H| <= HERMITIAN_RTOL * max|M|``.
HERMITIAN_RTOL = 1e-12
#: Relative eigenvalue threshold, ``lambda_min > PD_RTOL * lambda_max``.
PD_RTOL = 1e-12


def ctranspose(X):
    """Conjugate transpose over the last two axes."""
    return np.conj(np.swapaxes(X, -1, -2))


def hermitize(M):
    """Return ``(M + M^H) / 2`` as a complex array."""
    M = np.asarray(M, dtype=complex)
    return 0.5 * (M + ctranspose(M))


def check_hermitian(M, rtol=HERMITIAN_RTOL):
    """Validate a square Hermitian matrix and return its hermitized copy.

    Parameters
    ----------
    M : array_like, shape (p, p)
        Candidate Hermitian matrix.
    rtol : float
        Tolerance relative to the largest entry magnitude.

    Returns
    -------
    H : ndarray, shape (p, p), complex
        ``(M + M^H) / 2``.

    Raises
    ------
    DimMismatch
        If ``M`` is not a square 2-D array.
    NotHermitian
        If the asymmetry or the imaginary part of the diagonal exceeds
        ``rtol * max|M|``.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimMismatch(f"expected a square matrix, got shape {M.shape}")
    scale = np.max(np.abs(M)) if M.size else 0.0
    tol = rtol * scale
    if np.max(np.abs(M - M.conj().T), initial=0.0) > tol:
        raise NotHermitian("matrix is not Hermitian within tolerance")
    if np.max(np.abs(np.diag(M).imag), initial=0.0) > tol:
        raise NotHermitian("diagonal has a non-negligible imaginary part")
    return hermitize(M)


def check_hpd(M, rtol=PD_RTOL):
    """Validate a Hermitian positive definite matrix.

    Returns the hermitized matrix. Raises :class:`NotPositiveDefinite` when
    ``lambda_min <= rtol * lambda_max``.
    """
    H = check_hermitian(M)
    w = np.linalg.eigvalsh(H)
    if not (w[-1] > 0 and w[0] > rtol * w[-1]):
        raise NotPositiveDefinite(
            f"smallest eigenvalue {w[0]:.3e} not above {rtol:g} * largest {w[-1]:.3e}"
        )
    return H


def is_hpd(M):
    """Boolean form of :func:`check_hpd`."""
    try:
        check_hpd(M)
    except (NotHermitian, NotPositiveDefinite, DimMismatch):
        return False
    return True


def cholesky(M):
    """Lower Cholesky factor ``L`` with ``L L^H = M`` and positive real diagonal.

    Raises
    ------
    NotPositiveDefinite
        If a non-positive pivot is met during factorization.
    """
    H = check_hermitian(M)
    try:
        L = np.linalg.cholesky(H)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc
    return L


def eigh(M):
    """Eigendecomposition of a Hermitian matrix.

    Returns
    -------
    w : ndarray, shape (p,)
        Real eigenvalues in ascending order.
    U : ndarray, shape (p, p)
        Unitary matrix of eigenvectors, ``M = U diag(w) U^H``.
    """
    H = check_hermitian(M)
    try:
        w, U = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return w, U


def _spectral_map(w, U, func):
    return hermitize((U * func(w)) @ U.conj().T)


def logm_hpd(M):
    """Principal matrix logarithm of an HPD matrix, ``U diag(log w) U^H``."""
    w, U = eigh(check_hpd(M))
    return _spectral_map(w, U, np.log)


def expm_hermitian(X):
    """Matrix exponential of a Hermitian matrix, ``U diag(exp w) U^H``."""
    w, U = eigh(X)
    return _spectral_map(w, U, np.exp)


def solve_hpd(M, B):
    """Solve ``M X = B`` for HPD ``M`` through its Cholesky factor."""
    H = check_hermitian(M)
    B = np.asarray(B)
    if B.shape[0] != H.shape[0]:
        raise DimMismatch(f"cannot solve {H.shape} system with right-hand side {B.shape}")
    try:
        factor = scipy.linalg.cho_factor(H, lower=True, check_finite=True)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc
    return scipy.linalg.cho_solve(factor, B)


def whiten(L, M):
    """Congruence ``L^{-1} M L^{-H}`` for a lower-triangular ``L``, hermitized."""
    Y = scipy.linalg.solve_triangular(L, M, lower=True)
    Z = scipy.linalg.solve_triangular(L, Y.conj().T, lower=True)
    return hermitize(Z)


def trace_inverse_spd(F):
    """``tr(F^{-1})`` of a real SPD matrix via its Cholesky factor.

    Uses ``tr(F^{-1}) = ||L^{-1}||_F^2`` with ``F = L L^T``.
    """
    F = np.asarray(F, dtype=float)
    try:
        L = np.linalg.cholesky(0.5 * (F + F.T))
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc
    Linv = scipy.linalg.solve_triangular(L, np.eye(F.shape[0]), lower=True)
    return float(np.sum(Linv * Linv))
