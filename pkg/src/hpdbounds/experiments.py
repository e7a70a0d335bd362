"""Monte Carlo sweeps of estimator errors against the bounds.

Trial ``t`` draws everything from the stream ``(seed, t)``: in Bayesian mode a
fresh covariance from the prior, then the Gaussian samples. The largest ``n``
of the grid is drawn once per trial and each smaller ``n`` uses its leading
rows, so all grid points share common random numbers. Results are reduced in
trial order, hence identical for any worker count.
"""
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import bounds
from .distributions import (
    RNG_ALGO,
    GaussianModel,
    InverseWishartPrior,
    RngStream,
    sample_complex_gaussian,
    sample_inverse_wishart,
)
from .estimators import map_iw, mmse_iw, scm
from .exceptions import ConfigError
from .manifold import METRICS, distance

DEFAULT_N_GRID = (10, 15, 23, 34, 52, 79, 119, 179, 270, 408, 614, 925, 1394, 2099, 3162)
MODES = ("deterministic", "bayesian")
ESTIMATORS = ("SCM", "MAP", "MMSE")
WORKERS_ENV = "HPDBOUNDS_WORKERS"
RNG_DESCRIPTION = f"{RNG_ALGO}(seed,spawn_key=(trial,))"


def toeplitz_center(p, rho):
    """Real Toeplitz matrix with entries ``rho**|i - j|``."""
    if not -1 < rho < 1:
        raise ValueError(f"rho must lie in (-1, 1), got {rho}")
    k = np.arange(p)
    return (float(rho) ** np.abs(k[:, None] - k[None, :])).astype(complex)


@dataclass
class ExperimentConfig:
    p: int = 5
    rho: float = 0.5
    nu: float = 40.0
    n_grid: tuple = DEFAULT_N_GRID
    n_trials: int = 1000
    seed: int = 0
    mode: str = "bayesian"
    metrics: tuple = METRICS
    estimators: tuple = ESTIMATORS
    exact_ai: bool = False

    def __post_init__(self):
        self.n_grid = tuple(self.n_grid)
        self.metrics = tuple(self.metrics)
        self.estimators = tuple(self.estimators)
        self.validate()

    def validate(self):
        if isinstance(self.p, bool) or not isinstance(self.p, (int, np.integer)) or self.p < 1:
            raise ConfigError("p", f"must be a positive integer, got {self.p!r}")
        if not isinstance(self.rho, (int, float)) or not -1 < self.rho < 1:
            raise ConfigError("rho", f"must lie in (-1, 1), got {self.rho!r}")
        if not isinstance(self.nu, (int, float)) or not self.nu > self.p:
            raise ConfigError("nu", f"must exceed p={self.p}, got {self.nu!r}")
        grid = self.n_grid
        if not grid or any(isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1 for n in grid):
            raise ConfigError("n_grid", f"must be a non-empty list of positive integers, got {list(grid)!r}")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("n_grid", "must be strictly increasing")
        if isinstance(self.n_trials, bool) or not isinstance(self.n_trials, (int, np.integer)) or self.n_trials < 1:
            raise ConfigError("n_trials", f"must be a positive integer, got {self.n_trials!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < 2**64:
            raise ConfigError("seed", f"must be an integer in [0, 2**64), got {self.seed!r}")
        if self.mode not in MODES:
            raise ConfigError("mode", f"must be one of {MODES}, got {self.mode!r}")
        if not self.metrics or set(self.metrics) - set(METRICS) or len(set(self.metrics)) != len(self.metrics):
            raise ConfigError("metrics", f"must be a non-empty subset of {METRICS}, got {list(self.metrics)!r}")
        if not self.estimators or set(self.estimators) - set(ESTIMATORS) or len(set(self.estimators)) != len(self.estimators):
            raise ConfigError("estimators", f"must be a non-empty subset of {ESTIMATORS}, got {list(self.estimators)!r}")
        if not isinstance(self.exact_ai, bool):
            raise ConfigError("exact_ai", f"must be a boolean, got {self.exact_ai!r}")

    @classmethod
    def keys(cls):
        return [f.name for f in fields(cls)]

    @classmethod
    def from_dict(cls, data):
        unknown = sorted(set(data) - set(cls.keys()))
        if unknown:
            raise ConfigError(unknown[0], "unknown configuration key")
        return cls(**data)

    def to_dict(self):
        d = asdict(self)
        for k in ("n_grid", "metrics", "estimators"):
            d[k] = list(d[k])
        return d

    @property
    def sigma0(self):
        return toeplitz_center(self.p, self.rho)

    @property
    def prior(self):
        return InverseWishartPrior(self.sigma0, self.nu)


@dataclass(frozen=True)
class SummaryRow:
    mode: str
    metric: str
    series: str
    nu: float
    p: int
    n: int
    value: float
    std_err: float
    n_trials: int
    seed: int
    rng_algo: str = field(default=RNG_DESCRIPTION)

    def sort_key(self):
        return (self.series, self.metric, self.n)


def _estimate(name, prior, Y):
    if name == "SCM":
        return scm(Y)
    if name == "MAP":
        return map_iw(prior, Y)
    return mmse_iw(prior, Y)


def run_trial(config, n, trial_index):
    """Squared distances ``d^2(sigma, estimate)`` for one trial at one ``n``.

    Returns a dict keyed by ``(estimator, metric)``.
    """
    return _trial_all_n(config, trial_index, (n,))[0]


def _trial_all_n(config, trial_index, grid):
    gen = RngStream(config.seed, trial_index).generator()
    prior = config.prior
    sigma = sample_inverse_wishart(prior, gen) if config.mode == "bayesian" else prior.sigma0
    Y = sample_complex_gaussian(GaussianModel(sigma), max(grid), gen)
    out = []
    for n in grid:
        rec = {}
        for est in config.estimators:
            S_hat = _estimate(est, prior, Y[:n])
            for metric in config.metrics:
                rec[(est, metric)] = distance(metric, sigma, S_hat) ** 2
        out.append(rec)
    return out


def _series_keys(config):
    return [(est, metric) for est in config.estimators for metric in config.metrics]


def _run_chunk(args):
    config_dict, start, stop = args
    config = ExperimentConfig.from_dict(config_dict)
    keys = _series_keys(config)
    block = np.empty((stop - start, len(config.n_grid), len(keys)))
    for r, t in enumerate(range(start, stop)):
        for c, rec in enumerate(_trial_all_n(config, t, config.n_grid)):
            block[r, c] = [rec[k] for k in keys]
    return start, block


def default_workers():
    """Worker count from ``$HPDBOUNDS_WORKERS``, else 1."""
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        w = int(raw)
    except ValueError as exc:
        raise ConfigError("workers", f"{WORKERS_ENV}={raw!r} is not an integer") from exc
    if w < 1:
        raise ConfigError("workers", f"{WORKERS_ENV} must be positive, got {w}")
    return w


def simulate_errors(config, workers=None):
    """Raw squared errors of shape ``(n_trials, len(n_grid), n_series)`` and their keys."""
    workers = default_workers() if workers is None else int(workers)
    if workers < 1:
        raise ConfigError("workers", f"must be positive, got {workers}")
    T = config.n_trials
    n_chunks = min(T, max(1, 4 * workers))
    edges = np.linspace(0, T, n_chunks + 1).astype(int)
    tasks = [(config.to_dict(), int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    if workers == 1:
        parts = [_run_chunk(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, tasks))
    parts.sort(key=lambda sb: sb[0])
    return np.concatenate([b for _, b in parts], axis=0), _series_keys(config)


def bound_rows(config):
    """Closed-form bound rows for every ``n`` of the grid."""
    rows = []

    def add(metric, series, n, value):
        rows.append(SummaryRow(config.mode, metric, series, float(config.nu), config.p, int(n),
                               float(value), 0.0, 0, config.seed))

    sigma0 = config.sigma0
    for n in config.n_grid:
        if config.mode == "deterministic":
            if "euclidean" in config.metrics:
                add("euclidean", "CRB", n, bounds.crb_euclidean_deterministic(sigma0, n).value)
            if "ai" in config.metrics:
                add("ai", "ICRB", n, bounds.icrb_ai_asymptotic(config.p, n).value)
        else:
            if "euclidean" in config.metrics:
                add("euclidean", "BCRB", n, bounds.bcrb_euclidean(sigma0, config.nu, n).value)
                add("euclidean", "BCRB-Asymptotic", n, bounds.bcrb_euclidean_asymptotic(sigma0, config.nu, n).value)
            if "ai" in config.metrics:
                add("ai", "BICRB", n, bounds.bicrb_affine_invariant(config.nu, config.p, n, config.exact_ai).value)
                add("ai", "BICRB-Asymptotic", n, bounds.bicrb_affine_invariant_asymptotic(config.p, n).value)
    return rows


def run_sweep(config, workers=None):
    """Mean squared error per ``(estimator, metric, n)`` plus the bound rows.

    Rows are sorted by ``(series, metric, n)``.
    """
    errors, keys = simulate_errors(config, workers)
    T = config.n_trials
    mean = errors.mean(axis=0)
    se = errors.std(axis=0, ddof=1) / np.sqrt(T) if T > 1 else np.zeros_like(mean)
    rows = []
    for c, n in enumerate(config.n_grid):
        for k, (est, metric) in enumerate(keys):
            rows.append(SummaryRow(config.mode, metric, est, float(config.nu), config.p, int(n),
                                   float(mean[c, k]), float(se[c, k]), T, config.seed))
    rows.extend(bound_rows(config))
    return sorted(rows, key=SummaryRow.sort_key)
