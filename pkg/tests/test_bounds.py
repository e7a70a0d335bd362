import numpy as np
import pytest
from hypothesis import given, strategies as st

from hpdbounds import bounds as bd
from hpdbounds.exceptions import InvalidDegreesOfFreedom
from hpdbounds.experiments import DEFAULT_N_GRID, toeplitz_center
from hpdbounds.linalg import trace_inverse_spd

from conftest import random_hpd
from reference_values import REFERENCE

T5 = toeplitz_center(5, 0.5)


def test_fim_gaussian_examples(rng):
    assert bd.fim_gaussian_euclidean(np.array([[2.0]]), 7).entries[0, 0] == pytest.approx(7 / 4)
    assert np.allclose(bd.fim_gaussian_euclidean(np.eye(3), 4).entries, 4 * np.eye(9))
    S = random_hpd(rng, 4)
    v = bd.crb_euclidean_deterministic(S, 9).value
    assert v == pytest.approx(np.trace(S).real ** 2 / 9, rel=1e-10)


def test_crb_examples():
    assert bd.crb_euclidean_deterministic(T5, 10).value == pytest.approx(2.5, rel=1e-12)
    assert bd.crb_euclidean_deterministic(T5, 3162).value == pytest.approx(0.00790638836179632, rel=1e-12)
    assert bd.crb_euclidean_deterministic(np.array([[3.0]]), 5).value == pytest.approx(9 / 5)
    assert bd.icrb_ai_asymptotic(5, 925).value == pytest.approx(0.027027027027027, rel=1e-12)
    assert bd.icrb_ai_asymptotic(1, 1).value == 1


def test_expected_fim_examples():
    assert bd.expected_fim_euclidean_iw(T5, 40, 10).trace_inverse() == pytest.approx(1.90139512803819, rel=1e-9)
    assert bd.expected_fim_euclidean_iw(T5, 100, 10).trace_inverse() == pytest.approx(2.2498505766369, rel=1e-9)
    s2, nu, n = 1.7, 6.0, 3
    F = bd.expected_fim_euclidean_iw(np.array([[s2]]), nu, n).entries
    assert F[0, 0] == pytest.approx((n * nu**2 + n * nu) / ((nu - 1) ** 2 * s2**2))
    with pytest.raises(InvalidDegreesOfFreedom):
        bd.expected_fim_euclidean_iw(T5, 5, 10)


def test_euclidean_prior_coefficients():
    alpha, beta = bd.euclidean_prior_coefficients(40, 5)
    assert alpha == pytest.approx(72080 / 1225)
    # The (3 nu^2 + p nu) weight: the variant with -p nu misses the reference bound.
    assert beta == pytest.approx(5000 / 1225)
    F = bd.fprior_euclidean_iw(np.array([[2.0]]), 7).entries
    a, b = bd.euclidean_prior_coefficients(7, 1)
    assert F[0, 0] == pytest.approx((a + b) / 4)


def test_bcrb_examples():
    assert bd.bcrb_euclidean(T5, 40, 10).value == pytest.approx(0.342836403208648, rel=1e-9)
    assert bd.bcrb_euclidean(T5, 100, 10).value == pytest.approx(0.194754326165918, rel=1e-9)


def test_euclidean_bounds_match_reference_curves():
    for nu in (40, 100):
        for n in DEFAULT_N_GRID:
            assert bd.bcrb_euclidean(T5, nu, n).value == pytest.approx(REFERENCE[(f"nu{nu}", "euclidean", "BCRB")][n], rel=1e-9)
            assert bd.bcrb_euclidean_asymptotic(T5, nu, n).value == pytest.approx(
                REFERENCE[(f"nu{nu}", "euclidean", "BCRB-Asymptotic")][n], rel=1e-9)


def test_fprior_ai_examples():
    F = bd.fprior_affine_invariant(40, 5).entries
    assert F[0, 0] == 41 and F[0, 1] == 3 and F[5, 5] == 42
    assert np.count_nonzero(F[5:, :] - np.diag(np.diag(F))[5:, :]) == 0
    assert np.allclose(F, F.T)
    E = bd.fprior_affine_invariant(40, 5, exact=True).entries
    assert E[0, 0] == 45 and E[4, 4] == 81 + 36 and np.array_equal(E[5:, 5:], F[5:, 5:])


def test_bicrb_examples():
    assert bd.bicrb_affine_invariant(40, 5, 10).value == pytest.approx(0.504966154875219, rel=1e-9)
    assert bd.bicrb_affine_invariant(100, 5, 10).value == pytest.approx(0.225866225689131, rel=1e-9)
    assert bd.bicrb_affine_invariant(40, 5, 3162).value == pytest.approx(0.00779716823188569, rel=1e-9)
    with pytest.raises(InvalidDegreesOfFreedom):
        bd.bicrb_affine_invariant(5, 5, 10)


def test_assemble_examples(rng):
    I = np.eye(4)
    assert np.allclose(bd.assemble_bayesian_fisher(bd.FisherMatrix(I), bd.FisherMatrix(0 * I)).entries, I)
    A = np.real(random_hpd(rng, 4))
    B = np.real(random_hpd(rng, 4))
    assert bd.assemble_bayesian_fisher(A, B).trace_inverse() <= trace_inverse_spd(A)
    F = bd.expected_fim_euclidean_iw(T5, 40, 10) + bd.fprior_euclidean_iw(T5, 40)
    assert F.trace_inverse() == bd.bcrb_euclidean(T5, 40, 10).value


@pytest.mark.parametrize("nu", [6, 10, 40, 100])
def test_monotonicity_and_prior_tightening(nu):
    prev = {}
    for n in DEFAULT_N_GRID:
        cur = {
            "bcrb": bd.bcrb_euclidean(T5, nu, n).value,
            "bcrb_asym": bd.bcrb_euclidean_asymptotic(T5, nu, n).value,
            "bicrb": bd.bicrb_affine_invariant(nu, 5, n).value,
            "icrb": bd.icrb_ai_asymptotic(5, n).value,
            "crb": bd.crb_euclidean_deterministic(T5, n).value,
        }
        assert cur["bcrb"] < cur["bcrb_asym"]
        assert cur["bicrb"] < cur["icrb"]
        for k, v in cur.items():
            assert v > 0
            if k in prev:
                assert v < prev[k]
        prev = cur


def test_bicrb_asymptotic_rate():
    n = 10**6
    assert abs(n * bd.bicrb_affine_invariant(40, 5, n).value - 25) / 25 < 1e-2


def test_fisher_matrices_symmetric_pd():
    for F in (bd.fprior_euclidean_iw(T5, 10), bd.fprior_affine_invariant(10, 5), bd.expected_fim_euclidean_iw(T5, 10, 3)):
        assert np.allclose(F.entries, F.entries.T, rtol=1e-10)
        assert np.linalg.eigvalsh(F.entries).min() > 0


@given(st.integers(1, 4), st.floats(0.5, 50), st.integers(1, 500), st.booleans())
def test_bicrb_between_zero_and_asymptotic(p, extra, n, exact):
    F = bd.fprior_affine_invariant(p + extra, p, exact).entries
    assert np.linalg.eigvalsh(F).min() > 0
    v = bd.bicrb_affine_invariant(p + extra, p, n, exact).value
    assert 0 < v < p * p / n


def test_compute_bound_dispatch():
    assert bd.compute_bound("ai", "bayes", 5, 10, nu=40).value == bd.bicrb_affine_invariant(40, 5, 10).value
    assert bd.compute_bound("euclidean", "deterministic", 5, 10, sigma0=T5).value == pytest.approx(2.5)
    with pytest.raises(ValueError):
        bd.compute_bound("ai", "bayes", 5, 0, nu=40)
    with pytest.raises(ValueError):
        bd.compute_bound("euclidean", "bayes", 5, 10, nu=40)
