import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mhsic.exceptions import InvalidInputError
from mhsic.linalg import eigh_psd, hadamard, inv_sqrt_psd, pinv_psd, quad_form


def _fro_rel(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)


def random_psd(n, rank, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, rank))
    return A @ A.T


def test_pinv_identity():
    np.testing.assert_allclose(pinv_psd(np.eye(3), 1e-12), np.eye(3))


def test_pinv_zero():
    np.testing.assert_array_equal(pinv_psd(np.zeros((2, 2))), np.zeros((2, 2)))


def test_pinv_rank_one_by_hand():
    K = np.array([[2.0, 0.0], [0.0, 0.0]])
    P = pinv_psd(K)
    np.testing.assert_allclose(P, [[0.5, 0.0], [0.0, 0.0]], atol=1e-15)
    np.testing.assert_allclose(K @ P @ K, K, atol=1e-15)


def test_pinv_rejects_asymmetric_and_nan():
    with pytest.raises(InvalidInputError):
        pinv_psd(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(InvalidInputError):
        pinv_psd(np.array([[np.nan, 0.0], [0.0, 1.0]]))
    with pytest.raises(InvalidInputError):
        pinv_psd(np.ones((2, 3)))


def test_pinv_matches_numpy_on_rank_deficient():
    K = random_psd(12, 5, 0)
    np.testing.assert_allclose(pinv_psd(K), np.linalg.pinv(K, hermitian=True), atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 50), seed=st.integers(0, 2**31), frac=st.floats(0.2, 1.0))
def test_moore_penrose_identities(n, seed, frac):
    rank = max(1, int(frac * n))
    K = random_psd(n, rank, seed) + 0.0
    P = pinv_psd(K)
    assert np.array_equal(P, P.T)
    assert _fro_rel(K @ P @ K, K) <= 1e-8
    assert _fro_rel(P @ K @ P, P) <= 1e-8
    assert _fro_rel((K @ P).T, K @ P) <= 1e-8
    assert _fro_rel((P @ K).T, P @ K) <= 1e-8


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 30), seed=st.integers(0, 2**31))
def test_double_pinv_of_pd(n, seed):
    K = random_psd(n, n, seed) + n * np.eye(n)
    assert _fro_rel(pinv_psd(pinv_psd(K)), K) <= 1e-8


def test_eigh_psd_counts_dropped():
    K = random_psd(6, 2, 3)
    vals, vecs, dropped = eigh_psd(K)
    assert dropped == 4 and vals.size == 2
    assert np.all(vals > 0)


def test_eigh_psd_clamps_negative_roundoff():
    K = np.diag([1.0, -1e-17, 0.0])
    vals, _, dropped = eigh_psd(K)
    np.testing.assert_array_equal(vals, [1.0])
    assert dropped == 2


def test_inv_sqrt_squares_to_pinv():
    K = random_psd(8, 8, 4) + np.eye(8)
    R, dropped = inv_sqrt_psd(K)
    assert dropped == 0
    assert _fro_rel(R @ R, pinv_psd(K)) <= 1e-10


def test_hadamard_examples():
    A = np.array([[1.0, 2.0], [2.0, 1.0]])
    B = np.array([[0.0, 1.0], [1.0, 0.0]])
    np.testing.assert_array_equal(hadamard([A]), A)
    np.testing.assert_array_equal(hadamard([A, B]), [[0, 2], [2, 0]])
    np.testing.assert_array_equal(hadamard([A, np.ones((2, 2))]), A)


def test_hadamard_single_factor_is_a_copy():
    A = np.eye(2)
    out = hadamard([A])
    out[0, 0] = 5.0
    assert A[0, 0] == 1.0


def test_hadamard_errors():
    with pytest.raises(InvalidInputError):
        hadamard([])
    with pytest.raises(InvalidInputError):
        hadamard([np.eye(2), np.eye(3)])


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31), k=st.integers(2, 4))
def test_hadamard_commutes_and_associates(seed, k):
    rng = np.random.default_rng(seed)
    mats = [rng.standard_normal((5, 4)) for _ in range(k)]
    ref = hadamard(mats)
    rev = hadamard(mats[::-1])
    np.testing.assert_allclose(rev, ref, rtol=1e-14, atol=0)
    nested = hadamard([hadamard(mats[:2])] + mats[2:])
    np.testing.assert_allclose(nested, ref, rtol=1e-14, atol=0)


def test_quad_form_examples():
    assert quad_form([1, 0], np.eye(2), [1, 0]) == 1.0
    assert quad_form([1, 1], [[1, 2], [2, 1]], [1, 1]) == 6.0
    assert quad_form([0, 0], [[1, 2], [2, 1]], [3, 4]) == 0.0
    with pytest.raises(InvalidInputError):
        quad_form([1, 0, 0], np.eye(2), [1, 0])


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 20), seed=st.integers(0, 2**31))
def test_quad_form_symmetric(n, seed):
    rng = np.random.default_rng(seed)
    K = random_psd(n, n, seed)
    a, b = rng.standard_normal(n), rng.standard_normal(n)
    x, y = quad_form(a, K, b), quad_form(b, K, a)
    assert abs(x - y) <= 1e-12 * max(abs(x), 1.0)
