"""Complex Gaussian likelihood and inverse-Wishart prior.

The prior is parameterized as ``IW((nu - p) sigma0, nu)`` so that its mean is
``sigma0``. Samples are drawn through the complex Bartlett decomposition:
``sigma^{-1} = L A A^H L^H / (nu - p)`` with ``L = chol(sigma0^{-1})`` and
``A`` lower triangular, ``a_ij ~ CN(0, 1)`` below the diagonal and
``a_ii**2 ~ Gamma(nu - i + 1, 1)`` (that is, half a chi-square with
``2 (nu - i + 1)`` degrees of freedom).

Densities are unnormalized; additive constants are dropped.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import linalg
from .exceptions import DimMismatch, InvalidDegreesOfFreedom

#: Recorded next to every randomized output.
RNG_ALGO = "numpy-PCG64-SeedSequence"


@dataclass(frozen=True)
class RngStream:
    """Deterministic random stream keyed by ``(seed, stream_id)``.

    Distinct ``stream_id`` values spawn independent children of the same
    :class:`numpy.random.SeedSequence`.
    """

    seed: int = 0
    stream_id: int = 0

    def generator(self):
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(ss))


def as_generator(rng):
    """Accept an :class:`RngStream`, a ``Generator`` or an int seed."""
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return RngStream(int(rng)).generator()


@dataclass(frozen=True, eq=False)
class GaussianModel:
    """Zero-mean circular complex Gaussian ``CN(0, sigma)``."""

    sigma: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "sigma", linalg.check_hpd(self.sigma))

    @property
    def p(self):
        return self.sigma.shape[0]


@dataclass(frozen=True, eq=False)
class InverseWishartPrior:
    """Inverse-Wishart prior ``IW((nu - p) sigma0, nu)`` centred at ``sigma0``."""

    sigma0: np.ndarray
    nu: float
    _chol_inv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        sigma0 = linalg.check_hpd(self.sigma0)
        p = sigma0.shape[0]
        if not self.nu > p:
            raise InvalidDegreesOfFreedom(f"nu must exceed p={p}, got nu={self.nu}")
        object.__setattr__(self, "sigma0", sigma0)
        object.__setattr__(self, "nu", float(self.nu))
        inv = linalg.hermitize(np.linalg.inv(sigma0))
        object.__setattr__(self, "_chol_inv", linalg.cholesky(inv))

    @property
    def p(self):
        return self.sigma0.shape[0]

    @property
    def scale(self):
        return (self.nu - self.p) * self.sigma0

    @property
    def chol_inv(self):
        """Lower Cholesky factor of ``sigma0^{-1}``."""
        return self._chol_inv


@dataclass(frozen=True, eq=False)
class InverseWishartParams:
    """Generic complex inverse Wishart ``IW(scale, dof)`` with mean ``scale / (dof - p)``."""

    scale: np.ndarray
    dof: float

    @property
    def mean(self):
        p = self.scale.shape[0]
        if not self.dof > p:
            raise InvalidDegreesOfFreedom(f"mean requires dof > p={p}, got {self.dof}")
        return self.scale / (self.dof - p)


def bartlett_factor(p, dof, rng, size=()):
    """Lower-triangular complex Bartlett factor(s) ``A``.

    Parameters
    ----------
    p : int
        Dimension.
    dof : float
        Degrees of freedom, must exceed ``p - 1``.
    rng : RngStream, Generator or int
        Random source.
    size : tuple
        Batch shape; the result has shape ``size + (p, p)``.

    Returns
    -------
    A : ndarray, complex
        ``a_ij ~ CN(0, 1)`` for ``i > j``, ``a_ii = sqrt(G_i)`` with
        ``G_i ~ Gamma(dof - i + 1, 1)`` (1-based ``i``), zero above.
    """
    if not dof > p - 1:
        raise InvalidDegreesOfFreedom(f"Bartlett factor needs dof > p - 1 = {p - 1}, got {dof}")
    gen = as_generator(rng)
    size = tuple(np.atleast_1d(size)) if size != () else ()
    shapes = dof - np.arange(p)
    diag = np.sqrt(gen.standard_gamma(shapes, size=size + (p,)))
    z = (gen.standard_normal(size + (p, p)) + 1j * gen.standard_normal(size + (p, p))) * 2.0 ** -0.5
    A = np.tril(z, k=-1)
    idx = np.arange(p)
    A[..., idx, idx] = diag
    return A


def _hermitian_gram(W):
    return linalg.hermitize(W @ linalg.ctranspose(W))


def sample_complex_gaussian(model, n, rng):
    """Draw ``n`` samples ``y_k = L z_k``, ``L = chol(sigma)``, ``z_k ~ CN(0, I)``.

    Returns an array of shape ``(n, p)``; row ``k`` is ``y_k``.
    """
    if n < 1:
        raise ValueError(f"need at least one sample, got n={n}")
    if not isinstance(model, GaussianModel):
        model = GaussianModel(model)
    gen = as_generator(rng)
    p = model.p
    # Row-major (n, p, 2) draws: the first m rows equal an m-sample draw.
    g = gen.standard_normal((n, p, 2))
    z = (g[..., 0] + 1j * g[..., 1]) * 2.0 ** -0.5
    return z @ linalg.cholesky(model.sigma).T


def sample_inverse_wishart(prior, rng, size=None, return_factor=False):
    """Draw ``sigma ~ IW((nu - p) sigma0, nu)`` through the Bartlett construction.

    Parameters
    ----------
    prior : InverseWishartPrior
    rng : RngStream, Generator or int
    size : int, optional
        Number of draws; ``None`` returns a single ``(p, p)`` matrix.
    return_factor : bool
        Also return the Bartlett factor ``A`` used for each draw.
    """
    gen = as_generator(rng)
    p, nu = prior.p, prior.nu
    batch = () if size is None else (int(size),)
    A = bartlett_factor(p, nu, gen, size=batch)
    W = prior.chol_inv @ A
    Winv = np.linalg.inv(W)
    sigma = (nu - p) * linalg.hermitize(linalg.ctranspose(Winv) @ Winv)
    if return_factor:
        return sigma, A
    return sigma


def sample_complex_wishart(sigma, dof, rng, size=None):
    """Draw ``S ~ W(dof, sigma / dof)``, so that ``E[S] = sigma``.

    Uses the same Bartlett factor as the inverse-Wishart sampler:
    ``S = chol(sigma) A A^H chol(sigma)^H / dof``.
    """
    sigma = linalg.check_hpd(sigma)
    p = sigma.shape[0]
    if not dof >= p:
        raise InvalidDegreesOfFreedom(f"need dof >= p={p}, got {dof}")
    batch = () if size is None else (int(size),)
    A = bartlett_factor(p, dof, rng, size=batch)
    W = linalg.cholesky(sigma) @ A
    return _hermitian_gram(W) / dof


def _samples(samples, p=None):
    Y = np.asarray(samples, dtype=complex)
    if Y.ndim == 1:
        Y = Y.reshape(0, p or 0) if Y.size == 0 else Y[None, :]
    if Y.ndim != 2 or (p is not None and Y.shape[1] != p):
        raise DimMismatch(f"samples must have shape (n, {p}), got {Y.shape}")
    return Y


def scatter(samples, p=None):
    """Sum of outer products ``sum_k y_k y_k^H``."""
    Y = _samples(samples, p)
    return linalg.hermitize(Y.T @ Y.conj())


def log_likelihood_gaussian(sigma, samples):
    """Unnormalized Gaussian log-likelihood ``-n log|S| - sum_k y_k^H S^{-1} y_k``."""
    L = linalg.cholesky(sigma)
    Y = _samples(samples, L.shape[0])
    logdet = 2.0 * np.sum(np.log(np.real(np.diag(L))))
    V = scipy.linalg.solve_triangular(L, Y.T, lower=True)
    return float(-Y.shape[0] * logdet - np.sum(np.abs(V) ** 2))


def log_pdf_inverse_wishart(sigma, prior):
    """Unnormalized prior log-density ``-(nu + p) log|S| - (nu - p) tr(S^{-1} sigma0)``."""
    L = linalg.cholesky(sigma)
    if L.shape != prior.sigma0.shape:
        raise DimMismatch(f"sigma {L.shape} does not match prior dimension {prior.p}")
    logdet = 2.0 * np.sum(np.log(np.real(np.diag(L))))
    tr = np.real(np.trace(linalg.solve_hpd(sigma, prior.sigma0)))
    return float(-(prior.nu + prior.p) * logdet - (prior.nu - prior.p) * tr)


def posterior_params(prior, samples):
    """Conjugate update: ``IW((nu - p) sigma0 + sum y y^H, nu + n)``."""
    if not prior.nu > prior.p:
        raise InvalidDegreesOfFreedom(f"nu must exceed p={prior.p}")
    Y = _samples(samples, prior.p)
    return InverseWishartParams(prior.scale + scatter(Y, prior.p), prior.nu + Y.shape[0])
