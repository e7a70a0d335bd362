"""Closed-form covariance estimators: SCM, MAP and MMSE under the IW prior."""
from . import linalg
from .distributions import _samples, scatter
from .exceptions import EmptySampleSet, InvalidDegreesOfFreedom


def scm(samples):
    """Sample covariance ``(1/n) sum_k y_k y_k^H`` (normalized by ``n``)."""
    Y = _samples(samples)
    if Y.shape[0] == 0:
        raise EmptySampleSet("SCM needs at least one sample")
    return scatter(Y) / Y.shape[0]


def _shrink_numerator(prior, samples):
    Y = _samples(samples, prior.p)
    return prior.scale + scatter(Y, prior.p), Y.shape[0]


def map_iw(prior, samples):
    """Posterior mode ``((nu - p) sigma0 + sum y y^H) / (nu + n + p)``."""
    num, n = _shrink_numerator(prior, samples)
    return linalg.hermitize(num / (prior.nu + n + prior.p))


def mmse_iw(prior, samples):
    """Posterior mean ``((nu - p) sigma0 + sum y y^H) / (nu + n - p)``."""
    num, n = _shrink_numerator(prior, samples)
    if not prior.nu + n > prior.p:
        raise InvalidDegreesOfFreedom(f"posterior mean needs nu + n > p = {prior.p}")
    return linalg.hermitize(num / (prior.nu + n - prior.p))
