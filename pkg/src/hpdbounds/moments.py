"""Monte Carlo oracles for Wishart trace moments and prior Fisher information.

Each ``*_mc`` function returns a :class:`MomentEstimate` that can be compared
with its closed form through :meth:`MomentEstimate.agrees`. The function
:func:`validate_moments` runs the whole suite with fixed seeds.
"""
from dataclasses import dataclass

import numpy as np

from . import bounds, linalg
from .distributions import (
    InverseWishartPrior,
    RngStream,
    as_generator,
    bartlett_factor,
    sample_complex_wishart,
)
from .exceptions import InvalidDegreesOfFreedom
from .manifold import basis_index, canonical_basis, canonical_basis_stack

MIN_SAMPLES = 100


@dataclass(frozen=True)
class MomentEstimate:
    """Sample mean with its standard error ``std / sqrt(n_samples)``.

    ``mean`` and ``std_error`` are floats, or arrays for matrix-valued
    estimates.
    """

    mean: object
    std_error: object
    n_samples: int

    @classmethod
    def from_draws(cls, x):
        x = np.asarray(x, dtype=float)
        n = x.shape[0]
        if n < MIN_SAMPLES:
            raise ValueError(f"need at least {MIN_SAMPLES} draws, got {n}")
        mean = x.mean(axis=0)
        se = x.std(axis=0, ddof=1) / np.sqrt(n)
        if np.ndim(mean) == 0:
            return cls(float(mean), float(se), n)
        return cls(mean, se, n)

    def z_score(self, value):
        """``|mean - value| / std_error`` with the error floored at round-off level."""
        diff = np.abs(np.asarray(self.mean) - value)
        floor = 1e-12 * np.maximum(1.0, np.abs(value))
        return diff / np.maximum(np.asarray(self.std_error), floor)

    def agrees(self, value, n_sigma=3.0):
        return bool(np.all(self.z_score(value) <= n_sigma))


def _re_tr(X):
    return np.real(np.trace(X, axis1=-2, axis2=-1))


def _tr(X):
    return np.trace(X, axis1=-2, axis2=-1)


def _check_k(K, p):
    if not K >= p:
        raise InvalidDegreesOfFreedom(f"Wishart dof K={K} must be at least p={p}")


# Wishart moment identities for S ~ W(K, sigma / K)


def lemma1_lhs_mc(A, B, C, sigma, K, n_samples, rng):
    """Estimate ``E[tr(A S B S) tr(C S)]`` for ``S ~ W(K, sigma / K)``."""
    sigma = linalg.check_hpd(sigma)
    _check_k(K, sigma.shape[0])
    S = sample_complex_wishart(sigma, K, rng, size=n_samples)
    vals = _re_tr(A @ S @ B @ S) * _re_tr(C @ S)
    return MomentEstimate.from_draws(vals)


def lemma1_rhs(A, B, C, sigma, K):
    """Closed-form three-order expansion of ``E[tr(A S B S) tr(C S)]``."""
    sigma = linalg.check_hpd(sigma)
    _check_k(K, sigma.shape[0])
    a, b, c = (np.asarray(M) @ sigma for M in (A, B, C))
    t = np.trace
    lead = t(a @ b) * t(c)
    first = t(a @ b @ c) + t(a @ c @ b) + t(a) * t(b) * t(c)
    second = t(a @ c) * t(b) + t(b @ c) * t(a)
    return float(np.real(lead + first / K + second / K**2))


def lemma1_second_lhs_mc(A, B, C, D, sigma, K, n_samples, rng):
    """Estimate ``E[tr(A S B S) tr(C S D S)]`` for ``S ~ W(K, sigma / K)``."""
    sigma = linalg.check_hpd(sigma)
    _check_k(K, sigma.shape[0])
    S = sample_complex_wishart(sigma, K, rng, size=n_samples)
    vals = _re_tr(A @ S @ B @ S) * _re_tr(C @ S @ D @ S)
    return MomentEstimate.from_draws(vals)


def lemma1_second_rhs(A, B, C, D, sigma, K):
    """Closed-form four-order expansion of ``E[tr(A S B S) tr(C S D S)]``."""
    sigma = linalg.check_hpd(sigma)
    _check_k(K, sigma.shape[0])
    a, b, c, d = (np.asarray(M) @ sigma for M in (A, B, C, D))
    t = np.trace
    lead = t(a @ b) * t(c @ d)
    first = (
        t(a @ b @ c @ d) + t(a @ c @ d @ b) + t(a @ b @ d @ c) + t(a @ d @ c @ b)
        + t(a @ b) * t(c) * t(d) + t(c @ d) * t(a) * t(b)
    )
    second = (
        t(a @ d @ b) * t(c) + t(a @ c @ b) * t(d) + t(a @ d) * t(b @ c)
        + t(a @ b @ d) * t(c) + t(a @ b @ c) * t(d) + t(a @ c) * t(b @ d)
        + t(a) * t(b) * t(c) * t(d) + t(b @ c @ d) * t(a) + t(a @ c @ d) * t(b)
        + t(a @ d @ c) * t(b) + t(b @ d @ c) * t(a)
    )
    third = (
        t(a @ d @ b @ c) + t(a @ c) * t(b) * t(d) + t(a @ d) * t(b) * t(c)
        + t(b @ c) * t(a) * t(d) + t(b @ d) * t(a) * t(c) + t(a @ c @ b @ d)
    )
    return float(np.real(lead + first / K + second / K**2 + third / K**3))


# Prior expectations over sigma ~ IW((nu - p) sigma0, nu)

T_TERMS = ("T1", "T2", "T3", "T4")


def _index(p, i):
    return i.i if hasattr(i, "i") else basis_index(p, int(i)).i


def t_terms_closed_form(sigma0, nu, i, j, which):
    """Closed forms of the four prior expectations in the canonical basis.

    With ``A = tr(S0^{-1} O_i) tr(S0^{-1} O_j)`` and
    ``B = tr(S0^{-1} O_i S0^{-1} O_j)``:

    * ``T1 = E[tr(S^{-1} O_i) tr(S^{-1} O_j)]``
    * ``T2 = E[tr(S^{-1} O_i S^{-1} S0) tr(S^{-1} O_j S^{-1} S0)]``
    * ``T3 = E[tr(S^{-1} O_j) tr(S^{-1} O_i S^{-1} S0)]``
    * ``T4 = E[tr(S^{-1} O_i S^{-1} O_j)]``
    """
    sigma0 = linalg.check_hpd(sigma0)
    p = sigma0.shape[0]
    if not nu > p:
        raise InvalidDegreesOfFreedom(f"nu must exceed p={p}")
    Oi = canonical_basis(p, _index(p, i))
    Oj = canonical_basis(p, _index(p, j))
    Mi, Mj = linalg.solve_hpd(sigma0, Oi), linalg.solve_hpd(sigma0, Oj)
    A = float(np.real(np.trace(Mi)) * np.real(np.trace(Mj)))
    B = float(np.real(np.trace(Mi @ Mj)))
    d = nu - p
    if which == "T1":
        return (nu**2 * A + nu * B) / d**2
    if which == "T2":
        return (
            nu**4 * A + nu**3 * (4 * B + 2 * p * A) + nu**2 * (5 * A + 5 * p * B + p**2 * A)
            + nu * (3 * p * A + 2 * B + p**2 * B)
        ) / d**4
    if which == "T3":
        return (nu**3 * A + nu**2 * (2 * B + p * A) + nu * (p * B + A)) / d**3
    if which == "T4":
        return (nu**2 * B + nu * A) / d**2
    raise ValueError(f"unknown term {which!r}; expected one of {T_TERMS}")


def _prior_draws(prior, n_samples, rng):
    """Bartlett factors ``A``, precisions ``S^{-1}`` and covariances ``S``."""
    p, nu = prior.p, prior.nu
    A = bartlett_factor(p, nu, rng, size=(n_samples,))
    W = prior.chol_inv @ A
    prec = linalg.hermitize(W @ linalg.ctranspose(W)) / (nu - p)
    return A, W, prec


def _prior_basis(prior, W, basis):
    """Basis stack per draw: canonical, or ``H O H^H`` with ``H = sqrt(nu - p) W^{-H}``."""
    E = canonical_basis_stack(prior.p)
    if basis == "euclidean":
        return np.broadcast_to(E, (W.shape[0],) + E.shape)
    if basis == "ai":
        H = np.sqrt(prior.nu - prior.p) * linalg.ctranspose(np.linalg.inv(W))
        return H[:, None] @ E[None] @ linalg.ctranspose(H)[:, None]
    raise ValueError(f"unknown basis {basis!r}")


def _score_parts(prior, prec, Om):
    """``tr(S^{-1} O_i)`` and ``tr(S^{-1} O_i S^{-1} S0)`` for every draw and basis element."""
    PO = prec[:, None] @ Om
    u = _re_tr(PO)
    v = _re_tr(PO @ (prec @ prior.sigma0)[:, None])
    return u, v


def t_terms_mc(prior, i, j, which, n_samples, rng, basis="euclidean"):
    """Monte Carlo estimate of ``T1`` to ``T4`` over ``sigma ~ IW``.

    ``basis="ai"`` uses the per-draw orthonormal basis ``H O_i H^H`` built
    from the Bartlett factor, in which ``T1`` and ``T4`` are deterministic.
    """
    if which not in T_TERMS:
        raise ValueError(f"unknown term {which!r}; expected one of {T_TERMS}")
    ii, jj = _index(prior.p, i) - 1, _index(prior.p, j) - 1
    _, W, prec = _prior_draws(prior, n_samples, rng)
    Om = _prior_basis(prior, W, basis)[:, [ii, jj]]
    u, v = _score_parts(prior, prec, Om)
    if which == "T1":
        vals = u[:, 0] * u[:, 1]
    elif which == "T2":
        vals = v[:, 0] * v[:, 1]
    elif which == "T3":
        vals = u[:, 1] * v[:, 0]
    else:
        vals = _re_tr(prec @ Om[:, 0] @ prec @ Om[:, 1])
    return MomentEstimate.from_draws(vals)


def ai_prior_fisher_mc(nu, p, i, j, n_samples, rng, which="fbar"):
    """Estimate ``f_i = E tr(A O_i A^H)`` or ``Fbar_ij = E[tr(A O_i A^H) tr(A O_j A^H)]``.

    ``A`` is a Bartlett factor with ``nu`` degrees of freedom and ``O`` the
    canonical basis; ``j`` is ignored for ``which="f"``.
    """
    if not nu > p:
        raise InvalidDegreesOfFreedom(f"nu must exceed p={p}")
    A = bartlett_factor(p, nu, rng, size=(n_samples,))
    Ah = linalg.ctranspose(A)
    ti = _re_tr(A @ canonical_basis(p, _index(p, i)) @ Ah)
    if which == "f":
        return MomentEstimate.from_draws(ti)
    if which != "fbar":
        raise ValueError(f"unknown quantity {which!r}; expected 'f' or 'fbar'")
    tj = _re_tr(A @ canonical_basis(p, _index(p, j)) @ Ah)
    return MomentEstimate.from_draws(ti * tj)


def prior_score(prior, prec, Om):
    """Score of the log prior, ``-(nu + p) tr(S^{-1} O) + (nu - p) tr(S^{-1} O S^{-1} S0)``."""
    u, v = _score_parts(prior, prec, Om)
    return -(prior.nu + prior.p) * u + (prior.nu - prior.p) * v


def _outer_estimate(s):
    return MomentEstimate.from_draws(s[:, :, None] * s[:, None, :])


def fprior_euclidean_mc(prior, n_samples, rng):
    """Score outer-product estimate of the Euclidean prior information matrix."""
    _, W, prec = _prior_draws(prior, n_samples, rng)
    return _outer_estimate(prior_score(prior, prec, _prior_basis(prior, W, "euclidean")))


def fprior_affine_invariant_mc(nu, p, n_samples, rng, sigma0=None):
    """Score outer-product estimate of the affine-invariant prior information.

    The score is evaluated in the per-draw basis ``H O_i H^H``; the result must
    not depend on ``sigma0`` (identity by default).
    """
    prior = InverseWishartPrior(np.eye(p) if sigma0 is None else sigma0, nu)
    _, W, prec = _prior_draws(prior, n_samples, rng)
    return _outer_estimate(prior_score(prior, prec, _prior_basis(prior, W, "ai")))


def scaled_agreement(estimate, closed, rtol=0.05):
    """Largest ``|mc_ij - cf_ij| / sqrt(cf_ii cf_jj)``, compared against ``rtol``.

    Off-diagonal and structurally zero entries are judged on the scale of the
    matching diagonal entries.
    """
    closed = np.asarray(closed)
    d = np.sqrt(np.abs(np.diag(closed)))
    dev = np.abs(np.asarray(estimate.mean) - closed) / np.outer(d, d)
    worst = float(dev.max())
    return worst, worst <= rtol


# Fixed-seed validation suite


@dataclass(frozen=True)
class CheckResult:
    name: str
    estimate: float
    std_error: float
    expected: float
    statistic: float
    threshold: float
    passed: bool

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.name}: mc={self.estimate:.6g} se={self.std_error:.3g} "
                f"closed={self.expected:.6g} stat={self.statistic:.3g} <= {self.threshold:g}")


def _random_hermitian(rng, p):
    X = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
    return linalg.hermitize(X)


def _random_hpd(rng, p):
    X = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
    return linalg.hermitize(X @ X.conj().T / p + np.eye(p))


def _point(name, est, expected, perturb, n_sigma=3.0):
    expected = expected * perturb.get(name.split("[")[0], 1.0)
    z = float(est.z_score(expected))
    return CheckResult(name, est.mean, est.std_error, expected, z, n_sigma, z <= n_sigma)


def validate_moments(n_samples=10_000, seed=0, ps=(1, 2, 3), dofs=(10, 50), prior_p=3, prior_nu=10,
                     perturb=None, exact_ai=False):
    """Run every closed-form versus Monte Carlo check with fixed seeds.

    Parameters
    ----------
    n_samples : int
        Draws per check.
    seed : int
        Root seed; each check uses its own substream.
    perturb : dict, optional
        Fault injection: maps a check family (``"lemma1"``, ``"lemma1_second"``,
        ``"t_terms"``, ``"ai_f"``, ``"ai_fbar"``, ``"fprior_euclidean"``,
        ``"fprior_ai"``) to a factor applied to its closed form.
    exact_ai : bool
        Check the exact affine-invariant prior moments instead of the
        tabulated ones (see :func:`hpdbounds.bounds.ai_prior_fbar`).

    Returns
    -------
    list of CheckResult
    """
    perturb = dict(perturb or {})
    results = []
    stream = 0

    def next_rng():
        nonlocal stream
        stream += 1
        return RngStream(seed, stream).generator()

    for p in ps:
        for K in dofs:
            mats = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(10_000 + 100 * p + K,)))
            sigma = _random_hpd(mats, p)
            A, B, C, D = (_random_hermitian(mats, p) for _ in range(4))
            est = lemma1_lhs_mc(A, B, C, sigma, K, n_samples, next_rng())
            results.append(_point(f"lemma1[p={p},K={K}]", est, lemma1_rhs(A, B, C, sigma, K), perturb))
            est = lemma1_second_lhs_mc(A, B, C, D, sigma, K, n_samples, next_rng())
            results.append(_point(f"lemma1_second[p={p},K={K}]", est,
                                  lemma1_second_rhs(A, B, C, D, sigma, K), perturb))

    nu = prior_nu
    for p in ps:
        if not nu > p:
            continue
        mats = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(20_000 + p,)))
        prior = InverseWishartPrior(_random_hpd(mats, p), nu)
        pairs = [(1, 1), (1, p * p)] + ([(2, p + 1)] if p > 1 else [])
        for i, j in pairs:
            for which in T_TERMS:
                est = t_terms_mc(prior, i, j, which, n_samples, next_rng())
                results.append(_point(f"t_terms[{which},p={p},i={i},j={j}]", est,
                                      t_terms_closed_form(prior.sigma0, nu, i, j, which), perturb))
        f = bounds.ai_prior_f(nu, p)
        Fbar = bounds.ai_prior_fbar(nu, p, exact_ai)
        for i in range(1, p * p + 1):
            est = ai_prior_fisher_mc(nu, p, i, i, n_samples, next_rng(), which="f")
            results.append(_point(f"ai_f[p={p},i={i}]", est, f[i - 1], perturb))
            est = ai_prior_fisher_mc(nu, p, i, i, n_samples, next_rng(), which="fbar")
            results.append(_point(f"ai_fbar[p={p},i={i},j={i}]", est, Fbar[i - 1, i - 1], perturb))
        if p > 1:
            est = ai_prior_fisher_mc(nu, p, 1, 2, n_samples, next_rng(), which="fbar")
            results.append(_point(f"ai_fbar[p={p},i=1,j=2]", est, Fbar[0, 1], perturb))

    p = prior_p
    mats = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(30_000 + p,)))
    prior = InverseWishartPrior(_random_hpd(mats, p), prior_nu)
    for family, est, closed in (
        ("fprior_euclidean", fprior_euclidean_mc(prior, n_samples, next_rng()),
         bounds.fprior_euclidean_iw(prior.sigma0, prior_nu).entries),
        ("fprior_ai", fprior_affine_invariant_mc(prior_nu, p, n_samples, next_rng(), sigma0=prior.sigma0),
         bounds.fprior_affine_invariant(prior_nu, p, exact_ai).entries),
    ):
        closed = closed * perturb.get(family, 1.0)
        rtol = 0.05 * max(1.0, np.sqrt(10_000 / n_samples))
        worst, ok = scaled_agreement(est, closed, rtol)
        k = int(np.unravel_index(np.argmax(np.abs(est.mean - closed)), closed.shape)[0])
        results.append(CheckResult(f"{family}[p={p},nu={prior_nu},scaled-entrywise]", float(est.mean[k, k]),
                                   float(est.std_error[k, k]), float(closed[k, k]), worst, rtol, ok))
    return results
