import numpy as np
import pytest

from entdistill import linalg
from entdistill.distillation import haar_unitary
from entdistill.errors import DimensionMismatch, NonlinearAction, NotCompletelyPositive
from entdistill.maps import (
    OperatorMap,
    apply_map,
    apply_to_subsystem,
    compose,
    depolarizing_map,
    identity_map,
    is_cp,
    kraus_from_choi,
    map_from_action,
    map_from_kraus,
    output_partial_transpose,
    reduction_map,
    transpose_map,
    unitary_map,
    verify_decomposition,
)
from entdistill.criteria import ppt_check
from entdistill.states import Side, p_plus, partial_trace, psi_plus, random_density, random_separable

from conftest import ginibre


@pytest.mark.parametrize("n", [2, 3])
def test_choi_of_basic_maps(n):
    np.testing.assert_allclose(identity_map(n).choi, p_plus(n), atol=1e-15)
    np.testing.assert_allclose(transpose_map(n).choi, linalg.swap_operator(n) / n, atol=1e-15)
    np.testing.assert_allclose(reduction_map(n).choi, np.eye(n * n) / n - p_plus(n), atol=1e-15)


def test_nonlinear_action_rejected():
    with pytest.raises(NonlinearAction):
        map_from_action(2, lambda x: x @ x)


def test_apply_reduction_map(rng):
    lam = reduction_map(3)
    np.testing.assert_allclose(apply_map(lam, np.eye(3)), 2 * np.eye(3), atol=1e-14)
    np.testing.assert_allclose(apply_map(lam, np.diag([1, 0, 0])), np.diag([0, 1, 1]), atol=1e-14)
    sigma = ginibre(rng, 3, 3)
    np.testing.assert_allclose(apply_map(lam, sigma), np.eye(3) * np.trace(sigma) - sigma, atol=1e-10)
    with pytest.raises(DimensionMismatch):
        apply_map(lam, np.eye(2))


def test_choi_roundtrip(rng):
    a, b = ginibre(rng, 3, 3), ginibre(rng, 3, 3)
    action = lambda x: a @ x @ b + np.trace(x) * a  # noqa: E731
    m = map_from_action(3, action)
    for _ in range(5):
        x = ginibre(rng, 3, 3)
        np.testing.assert_allclose(apply_map(m, x), action(x), atol=1e-10)


def test_apply_to_subsystem():
    s = random_density(3, 4)
    # (I (x) Lambda) acting on B traces B out: rho_A (x) I - rho.
    out = apply_to_subsystem(reduction_map(3), s, Side.B)
    np.testing.assert_allclose(out, np.kron(partial_trace(s, Side.B), np.eye(3)) - s.rho, atol=1e-14)
    out_a = apply_to_subsystem(reduction_map(3), s, Side.A)
    np.testing.assert_allclose(out_a, np.kron(np.eye(3), partial_trace(s, Side.A)) - s.rho, atol=1e-14)
    np.testing.assert_allclose(apply_to_subsystem(identity_map(3), s), s.rho, atol=1e-14)
    for n in (2, 3, 4):
        t = apply_to_subsystem(transpose_map(n), psi_plus(n).projector())
        assert linalg.eigh(t).min == pytest.approx(-1 / n, abs=1e-12)
    with pytest.raises(DimensionMismatch):
        apply_to_subsystem(reduction_map(2), s)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_is_cp(n):
    ok, spec = is_cp(reduction_map(n))
    assert not ok and spec[0] == pytest.approx(1 / n - 1, abs=1e-12)
    assert not is_cp(transpose_map(n))[0]
    assert is_cp(unitary_map(haar_unitary(n, n)))[0]


def test_kraus_identity():
    k = kraus_from_choi(identity_map(3))
    assert len(k) == 1
    w = k.operators[0]
    np.testing.assert_allclose(w / (w[0, 0] / abs(w[0, 0])), np.eye(3), atol=1e-12)


def test_kraus_rejects_non_cp():
    with pytest.raises(NotCompletelyPositive):
        kraus_from_choi(reduction_map(2))


@pytest.mark.parametrize("n", [2, 3])
def test_kraus_of_gamma_reconstructs(n, rng):
    gamma = compose(transpose_map(n), reduction_map(n))
    k = kraus_from_choi(gamma)
    for _ in range(10):
        x = ginibre(rng, n, n)
        np.testing.assert_allclose(k(x), apply_map(gamma, x), atol=1e-9)
    np.testing.assert_allclose(map_from_kraus(k.operators).choi, gamma.choi, atol=1e-12)


@pytest.mark.parametrize("alpha", [0.0, 0.3, 1.0])
def test_depolarizing_is_cp(alpha):
    n = 3
    m = depolarizing_map(n, alpha)
    ok, spec = is_cp(m)
    assert ok
    # Choi spectrum: ((1-alpha)/n^2 + alpha) once and (1-alpha)/n^2 otherwise.
    np.testing.assert_allclose(spec[-1], (1 - alpha) / n**2 + alpha, atol=1e-12)
    assert len(kraus_from_choi(m)) <= n * n


def test_composition_choi_is_output_partial_transpose():
    lam = reduction_map(3)
    np.testing.assert_allclose(compose(transpose_map(3), lam).choi, output_partial_transpose(lam), atol=1e-14)


@pytest.mark.parametrize("seed", range(20))
def test_cp_maps_keep_states_positive(seed):
    m = map_from_kraus([ginibre(np.random.default_rng(seed), 3, 3) for _ in range(2)])
    s = random_density(3, seed + 100)
    assert linalg.eigh(apply_to_subsystem(m, s)).min >= -1e-9


@pytest.mark.parametrize("seed", range(30))
def test_ppt_states_satisfy_reduction_map(seed):
    s = random_separable(3, 2, seed) if seed % 2 else random_density(3, seed, rank=9)
    if ppt_check(s).satisfied:
        assert linalg.eigh(apply_to_subsystem(reduction_map(3), s)).min >= -1e-9


def test_verify_decomposition_n2():
    rep = verify_decomposition(2)
    assert rep.passed
    np.testing.assert_allclose(rep.gamma_spectrum, [0, 0, 0, 1], atol=1e-12)


def test_verify_decomposition_n3():
    rep = verify_decomposition(3)
    assert rep.passed
    np.testing.assert_allclose(rep.gamma_spectrum, [0] * 6 + [2 / 3] * 3, atol=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_reduction_choi_trace(n):
    # Tr(I/n (x) I) - Tr(P+) = n - 1.
    assert verify_decomposition(n, samples=5).choi_trace == pytest.approx(n - 1, abs=1e-12)


def test_operator_map_shape_check():
    with pytest.raises(DimensionMismatch):
        OperatorMap(2, 2, np.eye(3))
