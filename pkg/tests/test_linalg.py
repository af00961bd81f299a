import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entdistill import linalg
from entdistill.errors import NotHermitian, NotSquare, ShapeMismatch
from entdistill.states import psi_plus

from conftest import ginibre


def test_kron_identity_and_diagonal():
    np.testing.assert_array_equal(linalg.kron(np.eye(2), np.eye(2)), np.eye(4))
    np.testing.assert_array_equal(linalg.kron(np.diag([1, 2]), np.diag([3, 4])), np.diag([3, 4, 6, 8]))


def test_kron_matches_index_formula(rng):
    a, b = ginibre(rng, 3, 3), ginibre(rng, 3, 3)
    k = linalg.kron(a, b)
    for i, j, p, q in [(0, 0, 0, 0), (1, 2, 0, 1), (2, 1, 2, 2), (0, 2, 1, 0)]:
        assert abs(k[i * 3 + p, j * 3 + q] - a[i, j] * b[p, q]) < 1e-15


def test_eigh_simple_cases():
    np.testing.assert_allclose(linalg.eigh(np.diag([3.0, 1.0, 2.0])).values, [1, 2, 3])
    np.testing.assert_allclose(linalg.eigh([[0, 1], [1, 0]]).values, [-1, 1])


def test_eigh_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        linalg.eigh([[0, 1], [0, 0]])


def test_eigh_symmetrizes_within_tolerance():
    h = np.array([[1.0, 1e-12], [0.0, 2.0]])
    np.testing.assert_allclose(linalg.eigh(h).values, [1, 2], atol=1e-11)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 9))
def test_eigh_reconstruction(seed, n):
    rng = np.random.default_rng(seed)
    m = ginibre(rng, n, n)
    h = m + m.conj().T
    spec = linalg.eigh(h)
    v, w = spec.vectors, spec.values
    assert np.all(np.diff(w) >= 0)
    norm = np.linalg.norm(h, 2)
    np.testing.assert_allclose(h @ v, v * w, atol=1e-9 * norm)
    np.testing.assert_allclose((v * w) @ v.conj().T, h, atol=1e-9 * norm)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(n), atol=1e-10)
    assert abs(w.sum() - np.trace(h).real) < 1e-9 * max(1, norm)


def test_svd_simple():
    s, _, _ = linalg.svd(np.eye(3))
    np.testing.assert_allclose(s, [1, 1, 1])
    s, _, _ = linalg.svd(np.diag([0.0, 2.0]))
    np.testing.assert_allclose(s, [2, 0])


def test_svd_reconstruction_and_eigen_oracle(rng):
    a = ginibre(rng, 3, 3)
    s, u, w = linalg.svd(a)
    recon = sum(s[i] * np.outer(u[:, i], w[:, i].conj()) for i in range(3))
    np.testing.assert_allclose(recon, a, atol=1e-9 * np.linalg.norm(a, 2))
    np.testing.assert_allclose(np.sort(s**2), linalg.eigh(a.conj().T @ a).values, atol=1e-9)
    assert abs(linalg.op_norm(a) - s[0]) < 1e-10


def test_small_helpers(rng):
    a = ginibre(rng, 3, 4)
    np.testing.assert_array_equal(linalg.dagger(linalg.dagger(a)), a)
    assert linalg.op_norm(np.diag([1, -3])) == pytest.approx(3)
    assert linalg.frob_dist(a, a) == 0
    with pytest.raises(NotSquare):
        linalg.trace(a)


def test_trace_of_kron_factorizes(rng):
    a, b = ginibre(rng, 3, 3), ginibre(rng, 4, 4)
    assert abs(linalg.trace(linalg.kron(a, b)) - linalg.trace(a) * linalg.trace(b)) < 1e-10


def test_vec_matrix_roundtrip(rng):
    v = ginibre(rng, 6)
    np.testing.assert_array_equal(linalg.matrix_to_vec(linalg.vec_to_matrix(v, (2, 3))), v)
    with pytest.raises(ShapeMismatch):
        linalg.vec_to_matrix(v, (4, 2))


def test_vec_of_psi_plus_is_scaled_identity():
    np.testing.assert_allclose(np.sqrt(2) * linalg.vec_to_matrix(psi_plus(2).amplitudes, (2, 2)), np.eye(2))


def test_operator_recovered_from_filtered_psi_plus(rng):
    n = 3
    a = ginibre(rng, n, n)
    psi = np.kron(a, np.eye(n)) @ psi_plus(n).amplitudes
    np.testing.assert_allclose(np.sqrt(n) * linalg.vec_to_matrix(psi, (n, n)), a, atol=1e-12)


def test_transpose_trick(rng):
    n = 4
    a = ginibre(rng, n, n)
    p = psi_plus(n).amplitudes
    np.testing.assert_allclose(np.kron(a, np.eye(n)) @ p, np.kron(np.eye(n), a.T) @ p, atol=1e-12)


def test_swap_operator():
    v = linalg.swap_operator(3)
    x, y = np.eye(3)[0], np.eye(3)[2]
    np.testing.assert_array_equal(v @ np.kron(x, y), np.kron(y, x))
    np.testing.assert_array_equal(v @ v, np.eye(9))
