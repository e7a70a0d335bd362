"""Riemannian geometry of Hermitian positive definite matrices.

Two metrics are supported on the tangent space (the Hermitian matrices):

* ``"euclidean"``: ``<X, Y> = Re tr(X Y)``.
* ``"ai"`` (affine invariant): ``<X, Y>_S = Re tr(S^{-1} X S^{-1} Y)``.

Every affine-invariant quantity is evaluated in whitened form: with
``L = chol(S)`` the operand ``S^{-1} S_hat`` is replaced by the similar
Hermitian matrix ``L^{-1} S_hat L^{-H}``.

Basis elements are indexed from 1 to ``p**2`` in the order: ``p`` diagonal
elements, then the real symmetric pairs ``(1,2), (1,3), ..., (p-1,p)``, then
the imaginary Hermitian pairs in the same pair order.
"""
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from . import linalg
from .exceptions import BasePointMismatch, DimMismatch, IndexOutOfRange, NonOrthonormalBasis

METRICS = ("euclidean", "ai")
_SQRT_HALF = 2.0 ** -0.5


class BasisKind(Enum):
    DIAGONAL = "diagonal"
    SYM_PAIR = "sym"
    HERM_PAIR = "herm"


@dataclass(frozen=True)
class BasisIndex:
    """1-based position ``i`` of a canonical basis element for dimension ``p``.

    ``pair`` holds 1-based ``(m, n)`` with ``m < n`` for the pair kinds and
    ``(i, i)`` for diagonal elements.
    """

    p: int
    i: int
    kind: BasisKind
    pair: tuple

    @property
    def larger(self):
        """Larger of the two pair indices (``i`` itself for diagonal elements)."""
        return max(self.pair)


@lru_cache(maxsize=None)
def _pairs(p):
    return tuple((m, n) for m in range(1, p + 1) for n in range(m + 1, p + 1))


def basis_index(p, i):
    """Resolve the 1-based basis position ``i`` into a :class:`BasisIndex`."""
    if p < 1:
        raise DimMismatch(f"dimension must be positive, got {p}")
    if not 1 <= i <= p * p:
        raise IndexOutOfRange(f"basis index {i} outside [1, {p * p}]")
    if i <= p:
        return BasisIndex(p, i, BasisKind.DIAGONAL, (i, i))
    n_sym = p * (p + 1) // 2
    pairs = _pairs(p)
    if i <= n_sym:
        return BasisIndex(p, i, BasisKind.SYM_PAIR, pairs[i - p - 1])
    return BasisIndex(p, i, BasisKind.HERM_PAIR, pairs[i - n_sym - 1])


def basis_indices(p):
    """All :class:`BasisIndex` values for dimension ``p`` in canonical order."""
    return [basis_index(p, i) for i in range(1, p * p + 1)]


def canonical_basis(p, idx):
    """Euclidean-orthonormal basis element of the Hermitian matrices.

    Parameters
    ----------
    p : int
        Matrix dimension.
    idx : int or BasisIndex
        1-based position in ``[1, p**2]``.

    Returns
    -------
    Omega : ndarray, shape (p, p), complex
        ``E_ii`` for diagonal elements, ``(E_mn + E_nm) / sqrt(2)`` for
        symmetric pairs and ``1j (E_mn - E_nm) / sqrt(2)`` for Hermitian pairs.
    """
    if not isinstance(idx, BasisIndex):
        idx = basis_index(p, idx)
    elif idx.p != p:
        raise DimMismatch(f"basis index built for p={idx.p}, requested p={p}")
    out = np.zeros((p, p), dtype=complex)
    m, n = idx.pair[0] - 1, idx.pair[1] - 1
    if idx.kind is BasisKind.DIAGONAL:
        out[m, m] = 1.0
    elif idx.kind is BasisKind.SYM_PAIR:
        out[m, n] = out[n, m] = _SQRT_HALF
    else:
        out[m, n] = 1j * _SQRT_HALF
        out[n, m] = -1j * _SQRT_HALF
    return out


@lru_cache(maxsize=None)
def _canonical_stack(p):
    stack = np.stack([canonical_basis(p, i) for i in range(1, p * p + 1)])
    stack.setflags(write=False)
    return stack


def canonical_basis_stack(p):
    """All canonical basis elements as a read-only array of shape ``(p**2, p, p)``."""
    return _canonical_stack(p)


def hermitian_to_coords(X):
    """Coordinates ``Re tr(X Omega_i)`` of a Hermitian matrix in the canonical basis."""
    X = np.asarray(X)
    p = X.shape[-1]
    rows, cols = np.triu_indices(p, k=1)
    upper = X[..., rows, cols]
    return np.concatenate(
        [np.real(np.diagonal(X, axis1=-2, axis2=-1)),
         np.sqrt(2.0) * upper.real,
         np.sqrt(2.0) * upper.imag],
        axis=-1,
    )


def coords_to_hermitian(c, p):
    """Inverse of :func:`hermitian_to_coords`."""
    c = np.asarray(c, dtype=float)
    n_pairs = p * (p - 1) // 2
    if c.shape[-1] != p * p:
        raise DimMismatch(f"expected {p * p} coordinates, got {c.shape[-1]}")
    out = np.zeros(c.shape[:-1] + (p, p), dtype=complex)
    idx = np.arange(p)
    out[..., idx, idx] = c[..., :p]
    rows, cols = np.triu_indices(p, k=1)
    upper = _SQRT_HALF * (c[..., p:p + n_pairs] + 1j * c[..., p + n_pairs:])
    out[..., rows, cols] = upper
    out[..., cols, rows] = np.conj(upper)
    return out


@dataclass(frozen=True, eq=False)
class TangentVector:
    """Hermitian ``value`` attached to the HPD foot point ``base``."""

    base: np.ndarray
    value: np.ndarray

    def __post_init__(self):
        base = linalg.check_hermitian(self.base)
        value = linalg.check_hermitian(self.value)
        if base.shape != value.shape:
            raise DimMismatch(f"base {base.shape} and value {value.shape} differ")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "value", value)

    @property
    def p(self):
        return self.base.shape[0]


def _same_base(X, Y):
    if X.base is Y.base:
        return
    if X.base.shape != Y.base.shape or not np.allclose(X.base, Y.base, rtol=1e-12, atol=0.0):
        raise BasePointMismatch("tangent vectors live at different base points")


def metric_euclidean(X, Y):
    """Euclidean inner product ``Re tr(X Y)`` of two tangent vectors."""
    _same_base(X, Y)
    return float(np.real(np.sum(X.value * Y.value.T)))


def metric_affine_invariant(X, Y):
    """Affine-invariant inner product ``Re tr(S^{-1} X S^{-1} Y)`` at ``S = X.base``."""
    _same_base(X, Y)
    L = linalg.cholesky(X.base)
    Xw = linalg.whiten(L, X.value)
    Yw = linalg.whiten(L, Y.value)
    return float(np.real(np.sum(Xw * Yw.T)))


def metric(name, X, Y):
    """Dispatch to the inner product called ``name`` (``"euclidean"`` or ``"ai"``)."""
    if name == "euclidean":
        return metric_euclidean(X, Y)
    if name == "ai":
        return metric_affine_invariant(X, Y)
    raise ValueError(f"unknown metric {name!r}; expected one of {METRICS}")


def _pair(sigma, sigma_hat):
    sigma = linalg.check_hermitian(sigma)
    sigma_hat = linalg.check_hermitian(sigma_hat)
    if sigma.shape != sigma_hat.shape:
        raise DimMismatch(f"shapes {sigma.shape} and {sigma_hat.shape} differ")
    return sigma, sigma_hat


def log_euclidean(sigma, sigma_hat):
    """Euclidean logarithm ``sigma_hat - sigma`` at base ``sigma``."""
    sigma, sigma_hat = _pair(sigma, sigma_hat)
    return TangentVector(sigma, sigma_hat - sigma)


def exp_euclidean(sigma, X):
    """Euclidean exponential ``sigma + X``."""
    if not isinstance(X, TangentVector):
        X = TangentVector(sigma, X)
    return linalg.hermitize(X.base + X.value)


def log_affine_invariant(sigma, sigma_hat):
    """Affine-invariant logarithm ``S logm(S^{-1} S_hat)``.

    Evaluated as ``L logm(L^{-1} S_hat L^{-H}) L^H`` with ``L = chol(S)`` so
    that the result is exactly Hermitian.
    """
    sigma, sigma_hat = _pair(sigma, sigma_hat)
    linalg.check_hpd(sigma_hat)
    L = linalg.cholesky(sigma)
    W = linalg.logm_hpd(linalg.whiten(L, sigma_hat))
    return TangentVector(sigma, linalg.hermitize(L @ W @ L.conj().T))


def exp_affine_invariant(sigma, X):
    """Affine-invariant exponential ``L expm(L^{-1} X L^{-H}) L^H``."""
    if not isinstance(X, TangentVector):
        X = TangentVector(sigma, X)
    else:
        _same_base(X, TangentVector(sigma, np.zeros_like(X.value)))
    L = linalg.cholesky(X.base)
    E = linalg.expm_hermitian(linalg.whiten(L, X.value))
    return linalg.hermitize(L @ E @ L.conj().T)


def riemannian_log(name, sigma, sigma_hat):
    """Riemannian logarithm for the metric called ``name``."""
    if name == "euclidean":
        return log_euclidean(sigma, sigma_hat)
    if name == "ai":
        return log_affine_invariant(sigma, sigma_hat)
    raise ValueError(f"unknown metric {name!r}; expected one of {METRICS}")


def dist_euclidean(sigma, sigma_hat):
    """Frobenius distance ``||S_hat - S||_F`` (not squared)."""
    sigma, sigma_hat = _pair(sigma, sigma_hat)
    return float(np.linalg.norm(sigma_hat - sigma))


def dist_affine_invariant(sigma, sigma_hat):
    """Natural Riemannian distance ``||logm(S^{-1} S_hat)||_F`` (not squared).

    Computed as ``sqrt(sum(log(w)**2))`` where ``w`` are the eigenvalues of
    ``L^{-1} S_hat L^{-H}``.
    """
    sigma, sigma_hat = _pair(sigma, sigma_hat)
    L = linalg.cholesky(sigma)
    W = linalg.whiten(L, sigma_hat)
    w = np.linalg.eigvalsh(W)
    if not w[0] > linalg.PD_RTOL * w[-1]:
        raise linalg.NotPositiveDefinite("second argument is not positive definite")
    return float(np.sqrt(np.sum(np.log(w) ** 2)))


def distance(name, sigma, sigma_hat):
    """Riemannian distance for the metric called ``name``."""
    if name == "euclidean":
        return dist_euclidean(sigma, sigma_hat)
    if name == "ai":
        return dist_affine_invariant(sigma, sigma_hat)
    raise ValueError(f"unknown metric {name!r}; expected one of {METRICS}")


def euclidean_basis(sigma):
    """Canonical basis as tangent vectors at ``sigma``."""
    sigma = linalg.check_hermitian(sigma)
    return [TangentVector(sigma, Om) for Om in canonical_basis_stack(sigma.shape[0])]


def ai_orthonormal_basis(sigma, sqrt_factor=None):
    """Affine-invariant orthonormal basis ``H Omega_i H^H`` at ``sigma``.

    Parameters
    ----------
    sigma : ndarray, shape (p, p)
        HPD base point.
    sqrt_factor : ndarray, shape (p, p), optional
        Any ``H`` with ``H H^H = sigma``; defaults to ``chol(sigma)``.
    """
    sigma = linalg.check_hpd(sigma)
    H = linalg.cholesky(sigma) if sqrt_factor is None else np.asarray(sqrt_factor)
    stack = H @ canonical_basis_stack(sigma.shape[0]) @ H.conj().T
    return [TangentVector(sigma, Om) for Om in stack]


def gram_matrix(name, sigma, basis):
    """Gram matrix of ``basis`` under the metric called ``name`` at ``sigma``."""
    sigma = linalg.check_hermitian(sigma)
    values = np.stack([b.value for b in basis])
    for b in basis:
        _same_base(b, TangentVector(sigma, np.zeros_like(sigma)))
    if name == "ai":
        L = linalg.cholesky(sigma)
        values = np.stack([linalg.whiten(L, v) for v in values])
    elif name != "euclidean":
        raise ValueError(f"unknown metric {name!r}; expected one of {METRICS}")
    return np.real(np.einsum("iab,jba->ij", values, values))


def gram_check(name, sigma, basis):
    """Largest absolute deviation of the Gram matrix from the identity."""
    G = gram_matrix(name, sigma, basis)
    return float(np.max(np.abs(G - np.eye(G.shape[0]))))


def error_coordinates(name, sigma, sigma_hat, basis, atol=1e-9):
    """Coordinates ``<log_S(S_hat), Omega_i>_S`` of the estimation error.

    Parameters
    ----------
    name : {"euclidean", "ai"}
        Metric defining both the logarithm and the inner product.
    sigma, sigma_hat : ndarray, shape (p, p)
        True parameter and estimate.
    basis : sequence of TangentVector
        Orthonormal basis at ``sigma`` for the chosen metric.
    atol : float
        Allowed Gram deviation before :class:`NonOrthonormalBasis` is raised.

    Returns
    -------
    eps : ndarray, shape (p**2,)
        Real coordinate vector; ``||eps||**2`` equals the squared distance.
    """
    sigma = linalg.check_hermitian(sigma)
    if len(basis) != sigma.shape[0] ** 2:
        raise NonOrthonormalBasis(f"expected {sigma.shape[0] ** 2} elements, got {len(basis)}")
    dev = gram_check(name, sigma, basis)
    if dev > atol:
        raise NonOrthonormalBasis(f"Gram matrix deviates from identity by {dev:.3e}")
    X = riemannian_log(name, sigma, sigma_hat)
    return np.array([metric(name, X, b) for b in basis])
