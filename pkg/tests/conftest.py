import time

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hpdbounds.experiments import ExperimentConfig, run_sweep

settings.register_profile("repo", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


def random_hpd(rng, p, cond=10.0):
    X = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
    Q, _ = np.linalg.qr(X)
    w = np.exp(rng.uniform(0, np.log(cond), p))
    return (Q * w) @ Q.conj().T


def random_hermitian(rng, p):
    X = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
    return 0.5 * (X + X.conj().T)


def random_invertible(rng, p):
    return rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p)) + 2 * np.eye(p)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


class Sweep(dict):
    """Rows keyed by ``(metric, series, n)`` plus the wall time of the run."""

    def __init__(self, cfg, workers=4):
        start = time.perf_counter()
        rows = run_sweep(cfg, workers=workers)
        self.elapsed = time.perf_counter() - start
        self.rows = rows
        super().__init__({(r.metric, r.series, r.n): r for r in rows})


@pytest.fixture(scope="session")
def det_sweep():
    cfg = ExperimentConfig(mode="deterministic", estimators=("SCM",), n_trials=1000, seed=0)
    return Sweep(cfg)


@pytest.fixture(scope="session")
def bayes40_sweep():
    cfg = ExperimentConfig(mode="bayesian", nu=40, estimators=("MAP", "MMSE"), n_trials=1000, seed=0)
    return Sweep(cfg)


@pytest.fixture(scope="session")
def bayes100_sweep():
    cfg = ExperimentConfig(mode="bayesian", nu=100, estimators=("MAP", "MMSE"), n_trials=1000, seed=0)
    return Sweep(cfg)


def pytest_configure(config):
    config.acceptance_lines = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.acceptance_lines
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])


@pytest.fixture
def report(request):
    """Record and print the one-line verdict of an acceptance criterion."""

    def emit(criterion, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'} criterion {criterion}: {detail}"
        request.config.acceptance_lines[criterion] = line
        print(line)
        return passed

    return emit
