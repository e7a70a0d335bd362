import numpy as np
import pytest
from hypothesis import given, strategies as st

from hpdbounds import manifold as mf
from hpdbounds.exceptions import BasePointMismatch, IndexOutOfRange, NonOrthonormalBasis

from conftest import random_hermitian, random_hpd, random_invertible

R = 2 ** -0.5


def test_basis_index_blocks():
    p = 4
    kinds = [mf.basis_index(p, i).kind for i in range(1, p * p + 1)]
    assert kinds[:4] == [mf.BasisKind.DIAGONAL] * 4
    assert kinds[4:10] == [mf.BasisKind.SYM_PAIR] * 6
    assert kinds[10:] == [mf.BasisKind.HERM_PAIR] * 6
    order = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
    assert [mf.basis_index(p, i).pair for i in range(5, 11)] == order
    assert [mf.basis_index(p, i).pair for i in range(11, 17)] == order
    with pytest.raises(IndexOutOfRange):
        mf.basis_index(p, 17)
    with pytest.raises(IndexOutOfRange):
        mf.basis_index(p, 0)


def test_canonical_basis_examples():
    assert np.allclose(mf.canonical_basis(2, 1), np.diag([1, 0]))
    assert np.allclose(mf.canonical_basis(2, 3), [[0, R], [R, 0]])
    assert np.allclose(mf.canonical_basis(2, 4), [[0, 1j * R], [-1j * R, 0]])


def test_coordinates_round_trip(rng):
    for p in (1, 2, 5):
        X = random_hermitian(rng, p)
        c = mf.hermitian_to_coords(X)
        direct = [np.real(np.trace(X @ O)) for O in mf.canonical_basis_stack(p)]
        assert np.allclose(c, direct)
        assert np.allclose(mf.coords_to_hermitian(c, p), X)


def test_metric_examples(rng):
    S = random_hpd(rng, 2)
    O1, O2 = mf.canonical_basis(2, 1), mf.canonical_basis(2, 2)
    assert mf.metric_euclidean(mf.TangentVector(S, O1), mf.TangentVector(S, O1)) == pytest.approx(1)
    assert mf.metric_euclidean(mf.TangentVector(S, O1), mf.TangentVector(S, O2)) == 0
    X = np.array([[0, 1j], [-1j, 0]]) * R
    assert mf.metric_euclidean(mf.TangentVector(S, X), mf.TangentVector(S, X)) == pytest.approx(1)
    D = 2 * np.eye(2)
    v = mf.TangentVector(D, np.diag([1.0, 0]))
    assert mf.metric_affine_invariant(v, v) == pytest.approx(0.25)
    with pytest.raises(BasePointMismatch):
        mf.metric_euclidean(mf.TangentVector(S, O1), mf.TangentVector(np.eye(2), O1))


def test_ai_metric_identity_base_matches_euclidean(rng):
    for _ in range(100):
        X, Y = random_hermitian(rng, 3), random_hermitian(rng, 3)
        a = mf.TangentVector(np.eye(3), X)
        b = mf.TangentVector(np.eye(3), Y)
        assert mf.metric_affine_invariant(a, b) == pytest.approx(mf.metric_euclidean(a, b), rel=1e-12, abs=1e-12)


def test_ai_metric_congruence(rng):
    for _ in range(20):
        S, X, Y, A = random_hpd(rng, 3), random_hermitian(rng, 3), random_hermitian(rng, 3), random_invertible(rng, 3)
        Ah = A.conj().T
        v = mf.metric_affine_invariant(mf.TangentVector(S, X), mf.TangentVector(S, Y))
        Sa = A @ S @ Ah
        w = mf.metric_affine_invariant(mf.TangentVector(Sa, A @ X @ Ah), mf.TangentVector(Sa, A @ Y @ Ah))
        assert w == pytest.approx(v, rel=1e-9, abs=1e-12)


def test_log_exp_examples(rng):
    S, Sh = random_hpd(rng, 3), random_hpd(rng, 3)
    assert np.allclose(mf.log_euclidean(S, S).value, 0)
    assert np.allclose(mf.log_euclidean(np.eye(2), 2 * np.eye(2)).value, np.eye(2))
    assert np.allclose(mf.log_euclidean(S, Sh).value, -mf.log_euclidean(Sh, S).value)
    from hpdbounds.linalg import logm_hpd
    assert np.allclose(mf.log_affine_invariant(np.eye(3), Sh).value, logm_hpd(Sh))
    assert np.allclose(mf.log_affine_invariant(S, S).value, 0, atol=1e-12)
    assert np.allclose(mf.exp_affine_invariant(np.eye(2), np.zeros((2, 2))), np.eye(2))
    assert np.allclose(mf.exp_affine_invariant(np.eye(2), np.diag([1.0, 0])), np.diag([np.e, 1]))


def test_log_ai_is_sigma_logm(rng):
    from scipy.linalg import logm
    S, Sh = random_hpd(rng, 3), random_hpd(rng, 3)
    assert np.allclose(mf.log_affine_invariant(S, Sh).value, S @ logm(np.linalg.solve(S, Sh)), atol=1e-10)


def test_distance_examples(rng):
    S = random_hpd(rng, 4)
    assert mf.dist_euclidean(S, S) == 0
    assert mf.dist_euclidean(np.eye(5), 2 * np.eye(5)) == pytest.approx(np.sqrt(5))
    assert mf.dist_affine_invariant(S, 3.0 * S) == pytest.approx(2 * abs(np.log(3.0)), rel=1e-12)
    assert mf.dist_affine_invariant(np.eye(3), np.diag([np.e, 1, 1])) == pytest.approx(1)
    for _ in range(20):
        A, B, C = (random_hpd(rng, 3) for _ in range(3))
        assert mf.dist_euclidean(A, C) <= mf.dist_euclidean(A, B) + mf.dist_euclidean(B, C) + 1e-12
        assert mf.dist_affine_invariant(A, C) <= mf.dist_affine_invariant(A, B) + mf.dist_affine_invariant(B, C) + 1e-12


def test_distance_invariances_100_cases(rng):
    for _ in range(100):
        p = int(rng.integers(1, 7))
        S, Sh, A = random_hpd(rng, p), random_hpd(rng, p), random_invertible(rng, p)
        d = mf.dist_affine_invariant(S, Sh)
        Ah = A.conj().T
        assert mf.dist_affine_invariant(A @ S @ Ah, A @ Sh @ Ah) == pytest.approx(d, rel=1e-9, abs=1e-12)
        assert mf.dist_affine_invariant(Sh, S) == pytest.approx(d, rel=1e-9, abs=1e-12)
        assert mf.dist_affine_invariant(np.linalg.inv(S), np.linalg.inv(Sh)) == pytest.approx(d, rel=1e-9, abs=1e-12)


def test_exp_log_round_trips_100_cases(rng):
    for _ in range(100):
        p = int(rng.integers(1, 7))
        S, Sh = random_hpd(rng, p), random_hpd(rng, p)
        back = mf.exp_affine_invariant(S, mf.log_affine_invariant(S, Sh))
        assert np.linalg.norm(back - Sh) / np.linalg.norm(Sh) < 1e-8
        back = mf.exp_euclidean(S, mf.log_euclidean(S, Sh))
        assert np.linalg.norm(back - Sh) / np.linalg.norm(Sh) < 1e-8


def test_error_coordinates_norm_equals_distance_100_cases(rng):
    for _ in range(100):
        p = int(rng.integers(1, 7))
        S, Sh = random_hpd(rng, p), random_hpd(rng, p)
        for name, basis in (("euclidean", mf.euclidean_basis(S)), ("ai", mf.ai_orthonormal_basis(S))):
            eps = mf.error_coordinates(name, S, Sh, basis)
            d2 = mf.distance(name, S, Sh) ** 2
            assert np.sum(eps**2) == pytest.approx(d2, rel=1e-9, abs=1e-14)
        eps = mf.error_coordinates("euclidean", S, Sh, mf.euclidean_basis(S))
        assert abs(np.sum(eps**2) - mf.dist_euclidean(S, Sh) ** 2) < 1e-12 * max(1.0, np.sum(eps**2))


def test_error_coordinates_examples(rng):
    S = random_hpd(rng, 2)
    assert np.allclose(mf.error_coordinates("ai", S, S, mf.ai_orthonormal_basis(S)), 0, atol=1e-12)
    eps = mf.error_coordinates("euclidean", S, S + 0.3 * mf.canonical_basis(2, 3), mf.euclidean_basis(S))
    assert np.allclose(eps, [0, 0, 0.3, 0])
    Sh = random_hpd(rng, 2)
    basis = mf.ai_orthonormal_basis(S)
    eps = mf.error_coordinates("ai", S, Sh, basis)
    recon = sum(e * b.value for e, b in zip(eps, basis))
    assert np.allclose(recon, mf.log_affine_invariant(S, Sh).value, atol=1e-9)


def test_error_coordinates_rejects_bad_basis(rng):
    S = random_hpd(rng, 2)
    with pytest.raises(NonOrthonormalBasis):
        mf.error_coordinates("ai", S, S, mf.euclidean_basis(S))
    with pytest.raises(NonOrthonormalBasis):
        mf.error_coordinates("euclidean", S, S, mf.euclidean_basis(S)[:3])


def test_ai_basis_and_gram_check(rng):
    assert all(np.allclose(b.value, O) for b, O in zip(mf.ai_orthonormal_basis(np.eye(2)), mf.canonical_basis_stack(2)))
    D = np.diag([4.0, 1.0])
    basis = mf.ai_orthonormal_basis(D)
    assert np.allclose(basis[0].value, np.diag([4.0, 0]))
    assert mf.gram_check("ai", D, basis) < 1e-12
    S = random_hpd(rng, 3)
    assert mf.gram_check("ai", S, mf.ai_orthonormal_basis(S)) < 1e-9
    assert mf.gram_check("euclidean", S, mf.euclidean_basis(S)) < 1e-12
    scaled = [mf.TangentVector(S, 1.5 * b.value) for b in mf.euclidean_basis(S)]
    assert mf.gram_check("euclidean", S, scaled) == pytest.approx(1.25)


@given(st.integers(1, 5), st.floats(0.2, 5.0), st.integers(0, 2**32 - 1))
def test_scaling_distance_property(p, alpha, seed):
    S = random_hpd(np.random.default_rng(seed), p)
    assert mf.dist_affine_invariant(S, alpha * S) == pytest.approx(np.sqrt(p) * abs(np.log(alpha)), rel=1e-9, abs=1e-12)
