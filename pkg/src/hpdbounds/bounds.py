"""Fisher matrices and Cramér-Rao type bounds for covariance estimation.

Fisher matrices are ``p**2 x p**2`` real symmetric arrays in the canonical
basis order of :mod:`hpdbounds.manifold`. Euclidean matrices use the canonical
basis itself. Affine-invariant matrices use the orthonormal basis
``H Omega_i H^H``, in which the Gaussian information is ``n I`` and the
inverse-Wishart prior information does not depend on the prior center.

Every bound is ``tr(F^{-1})`` with curvature corrections neglected.
"""
from dataclasses import dataclass

import numpy as np

from . import linalg
from .exceptions import DimMismatch, InvalidDegreesOfFreedom
from .manifold import basis_indices, canonical_basis_stack

KINDS = ("deterministic", "bayes-asymptotic", "bayes")


@dataclass(frozen=True, eq=False)
class FisherMatrix:
    """Real symmetric Fisher matrix in basis coordinates."""

    entries: np.ndarray

    def __post_init__(self):
        F = np.asarray(self.entries, dtype=float)
        q = F.shape[0]
        p = int(round(np.sqrt(q)))
        if F.ndim != 2 or F.shape != (q, q) or p * p != q:
            raise DimMismatch(f"Fisher matrix must be p^2 x p^2, got {F.shape}")
        scale = np.max(np.abs(F)) if F.size else 0.0
        if np.max(np.abs(F - F.T)) > 1e-10 * scale:
            raise ValueError("Fisher matrix is not symmetric")
        object.__setattr__(self, "entries", 0.5 * (F + F.T))

    @property
    def p(self):
        return int(round(np.sqrt(self.entries.shape[0])))

    def __add__(self, other):
        return assemble_bayesian_fisher(self, other)

    def trace_inverse(self):
        return linalg.trace_inverse_spd(self.entries)


@dataclass(frozen=True)
class BoundReport:
    """Lower bound on the expected squared distance for one configuration."""

    metric: str
    kind: str
    p: int
    n: int
    nu: float
    value: float


def _check_n(n):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return int(n)


def _check_nu(nu, p):
    if not nu > p:
        raise InvalidDegreesOfFreedom(f"nu must exceed p={p}, got nu={nu}")
    return float(nu)


def _trace_products(sigma):
    """``B_ij = Re tr(S^{-1} O_i S^{-1} O_j)`` and ``A_ij = tr(S^{-1} O_i) tr(S^{-1} O_j)``."""
    sigma = linalg.check_hpd(sigma)
    p = sigma.shape[0]
    basis = canonical_basis_stack(p)
    M = np.stack([linalg.solve_hpd(sigma, Om) for Om in basis])
    B = np.real(np.einsum("iab,jba->ij", M, M))
    t = np.real(np.trace(M, axis1=1, axis2=2))
    return B, np.outer(t, t)


def fim_gaussian_euclidean(sigma, n):
    """Gaussian Fisher matrix ``n Re tr(S^{-1} O_i S^{-1} O_j)`` in the canonical basis."""
    n = _check_n(n)
    B, _ = _trace_products(sigma)
    return FisherMatrix(n * B)


def crb_euclidean_deterministic(sigma, n):
    """``tr(F^{-1})`` for fixed ``sigma``; equals ``(tr sigma)**2 / n``."""
    F = fim_gaussian_euclidean(sigma, n)
    return BoundReport("euclidean", "deterministic", F.p, int(n), None, F.trace_inverse())


def icrb_ai_asymptotic(p, n):
    """Intrinsic bound without prior information, ``p**2 / n``."""
    n = _check_n(n)
    if p < 1:
        raise DimMismatch(f"dimension must be positive, got {p}")
    return BoundReport("ai", "deterministic", int(p), n, None, p * p / n)


def expected_fim_euclidean_iw(sigma0, nu, n):
    """Gaussian Fisher matrix averaged over ``sigma ~ IW((nu - p) sigma0, nu)``.

    ``n nu^2 / (nu - p)^2 * B + n nu / (nu - p)^2 * A`` with ``B``, ``A`` the
    trace products at ``sigma0``.
    """
    n = _check_n(n)
    B, A = _trace_products(sigma0)
    p = int(round(np.sqrt(B.shape[0])))
    nu = _check_nu(nu, p)
    d2 = (nu - p) ** 2
    return FisherMatrix(n * nu**2 / d2 * B + n * nu / d2 * A)


def euclidean_prior_coefficients(nu, p):
    """Weights ``(alpha, beta)`` of ``B`` and ``A`` in the Euclidean prior information."""
    nu = _check_nu(nu, p)
    d2 = (nu - p) ** 2
    alpha = (nu**3 + p * nu**2 + 2 * nu) / d2
    beta = (3 * nu**2 + p * nu) / d2
    return alpha, beta


def fprior_euclidean_iw(sigma0, nu):
    """Prior information ``alpha B + beta A`` of the inverse Wishart, canonical basis."""
    B, A = _trace_products(sigma0)
    p = int(round(np.sqrt(B.shape[0])))
    alpha, beta = euclidean_prior_coefficients(nu, p)
    return FisherMatrix(alpha * B + beta * A)


def assemble_bayesian_fisher(expected_fim, fprior):
    """Bayesian information ``E[F] + F_prior``."""
    a = expected_fim.entries if isinstance(expected_fim, FisherMatrix) else np.asarray(expected_fim)
    b = fprior.entries if isinstance(fprior, FisherMatrix) else np.asarray(fprior)
    if a.shape != b.shape:
        raise DimMismatch(f"cannot add Fisher matrices of shapes {a.shape} and {b.shape}")
    return FisherMatrix(a + b)


def bcrb_euclidean(sigma0, nu, n):
    """Euclidean Bayesian bound ``tr((E[F] + F_prior)^{-1})``."""
    F = assemble_bayesian_fisher(expected_fim_euclidean_iw(sigma0, nu, n), fprior_euclidean_iw(sigma0, nu))
    return BoundReport("euclidean", "bayes", F.p, int(n), float(nu), F.trace_inverse())


def bcrb_euclidean_asymptotic(sigma0, nu, n):
    """Euclidean bound without the prior information term, ``tr(E[F]^{-1})``."""
    F = expected_fim_euclidean_iw(sigma0, nu, n)
    return BoundReport("euclidean", "bayes-asymptotic", F.p, int(n), float(nu), F.trace_inverse())


def ai_prior_f(nu, p):
    """``f_i = E tr(A O_i A^H)`` for a Bartlett factor ``A`` with ``nu`` dof.

    ``nu + p - 2i + 1`` on the diagonal elements, zero on the pairs.
    """
    nu = _check_nu(nu, p)
    f = np.zeros(p * p)
    i = np.arange(1, p + 1)
    f[:p] = nu + p - 2 * i + 1
    return f


def ai_prior_fbar(nu, p, exact=False):
    """``Fbar_ij = E[tr(A O_i A^H) tr(A O_j A^H)]`` for a Bartlett factor ``A``.

    Diagonal element ``i`` sums column ``i`` of ``A``, a ``Gamma(f_i)``
    variable, so its exact second moment is ``f_i^2 + f_i``. The default
    (``exact=False``) keeps only the variance ``nu - i + 1`` of ``|a_ii|^2``,
    which reproduces the tabulated reference bounds.
    """
    f = ai_prior_f(nu, p)
    Fbar = np.zeros((p * p, p * p))
    Fbar[:p, :p] = np.outer(f[:p], f[:p])
    i = np.arange(1, p + 1)
    Fbar[i - 1, i - 1] += f[:p] if exact else nu - i + 1
    for idx in basis_indices(p)[p:]:
        Fbar[idx.i - 1, idx.i - 1] = nu + p - 2 * idx.larger + 1
    return Fbar


def fprior_affine_invariant(nu, p, exact=False):
    """Affine-invariant prior information of ``IW((nu - p) sigma0, nu)``.

    With ``t_i = tr(O_i)`` (one on diagonal elements, zero on pairs) the entry
    is ``(nu + p)^2 t_i t_j - (nu + p)(f_i t_j + f_j t_i) + Fbar_ij``. On the
    diagonal block this reduces to ``(2i - 1)(2j - 1) + delta_ij (nu - i + 1)``,
    with ``nu + p - 2i + 1`` in place of ``nu - i + 1`` when ``exact=True``
    (see :func:`ai_prior_fbar`). A pair element with larger index ``m`` contributes
    ``nu + p - 2m + 1`` on the diagonal only.
    """
    if p < 1:
        raise DimMismatch(f"dimension must be positive, got {p}")
    nu = _check_nu(nu, p)
    f = ai_prior_f(nu, p)
    t = np.zeros(p * p)
    t[:p] = 1.0
    F = (nu + p) ** 2 * np.outer(t, t) - (nu + p) * (np.outer(f, t) + np.outer(t, f)) + ai_prior_fbar(nu, p, exact)
    return FisherMatrix(F)


def bicrb_affine_invariant(nu, p, n, exact=False):
    """Intrinsic Bayesian bound ``tr((n I + F_prior)^{-1})``; free of ``sigma0``."""
    n = _check_n(n)
    F = assemble_bayesian_fisher(n * np.eye(p * p), fprior_affine_invariant(nu, p, exact))
    return BoundReport("ai", "bayes", int(p), n, float(nu), F.trace_inverse())


def bicrb_affine_invariant_asymptotic(p, n, nu=None):
    """Intrinsic bound with the prior term dropped; same value as :func:`icrb_ai_asymptotic`."""
    rep = icrb_ai_asymptotic(p, n)
    return BoundReport("ai", "bayes-asymptotic", rep.p, rep.n, None if nu is None else float(nu), rep.value)


def compute_bound(metric, kind, p, n, nu=None, sigma0=None, exact=False):
    """Dispatch on ``(metric, kind)``; ``sigma0`` is needed for Euclidean bounds."""
    if kind not in KINDS:
        raise ValueError(f"unknown bound kind {kind!r}; expected one of {KINDS}")
    if metric == "ai":
        if kind == "bayes":
            return bicrb_affine_invariant(nu, p, n, exact)
        if kind == "bayes-asymptotic":
            if nu is not None:
                _check_nu(nu, p)
            return bicrb_affine_invariant_asymptotic(p, n, nu)
        return icrb_ai_asymptotic(p, n)
    if metric == "euclidean":
        if sigma0 is None:
            raise ValueError("Euclidean bounds need the covariance sigma0")
        if kind == "bayes":
            return bcrb_euclidean(sigma0, nu, n)
        if kind == "bayes-asymptotic":
            return bcrb_euclidean_asymptotic(sigma0, nu, n)
        return crb_euclidean_deterministic(sigma0, n)
    raise ValueError(f"unknown metric {metric!r}")

