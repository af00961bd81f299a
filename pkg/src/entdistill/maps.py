"""Linear maps on matrices, stored as Choi matrices.

The Choi matrix of ``L: M_n -> M_k`` is ``(I (x) L)(P+)``, i.e. the trace-one
convention

    C[(i, a), (j, b)] = L(|i><j|)[a, b] / n.

The unnormalized convention ``sum_ij |i><j| (x) L(|i><j|)`` is ``n * C``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .errors import DimensionMismatch, NonlinearAction, NotCompletelyPositive
from .states import BipartiteState, Side, _check_dim, _rng, partial_transpose

CP_TOL = 1e-9
KRAUS_DROP_TOL = 1e-12


@dataclass(frozen=True)
class OperatorMap:
    in_dim: int
    out_dim: int
    choi: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = linalg.as_matrix(self.choi)
        d = self.in_dim * self.out_dim
        if c.shape != (d, d):
            raise DimensionMismatch(f"choi has shape {c.shape}, expected {(d, d)}")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "choi", c)

    def __call__(self, sigma) -> np.ndarray:
        return apply_map(self, sigma)


@dataclass(frozen=True)
class KrausSet:
    operators: tuple

    def __call__(self, sigma) -> np.ndarray:
        s = linalg.as_matrix(sigma)
        return sum(w @ s @ w.conj().T for w in self.operators)

    def __len__(self):
        return len(self.operators)


def map_from_action(
    n: int,
    action: Callable[[np.ndarray], np.ndarray],
    out_dim: int | None = None,
    seed=0,
    checks: int = 3,
) -> OperatorMap:
    """Sample ``action`` on matrix units and assemble its Choi matrix.

    Linearity is spot-checked on ``checks`` random pairs.

    Raises:
        NonlinearAction: if a spot check misses by more than 1e-9 (relative).
    """
    blocks = {}
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=np.complex128)
            e[i, j] = 1.0
            blocks[i, j] = linalg.as_matrix(action(e))
    k = blocks[0, 0].shape[0] if out_dim is None else out_dim
    choi = np.zeros((n * k, n * k), dtype=np.complex128)
    for (i, j), b in blocks.items():
        if b.shape != (k, k):
            raise DimensionMismatch(f"action returned shape {b.shape}, expected {(k, k)}")
        choi[i * k : (i + 1) * k, j * k : (j + 1) * k] = b / n
    m = OperatorMap(n, k, choi)

    rng = _rng(seed)
    for _ in range(checks):
        x, y = (rng.standard_normal((n, n, 2)) @ np.array([1.0, 1.0j]) for _ in range(2))
        a, b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        lhs = linalg.as_matrix(action(a * x + b * y))
        rhs = apply_map(m, a * x + b * y)
        scale = max(1.0, np.abs(rhs).max())
        if np.abs(lhs - rhs).max() > 1e-9 * scale:
            raise NonlinearAction("action fails the linearity spot check")
    return m


def apply_map(m: OperatorMap, sigma) -> np.ndarray:
    s = linalg.as_matrix(sigma)
    if s.shape != (m.in_dim, m.in_dim):
        raise DimensionMismatch(f"input {s.shape} does not match in_dim {m.in_dim}")
    c = m.choi.reshape(m.in_dim, m.out_dim, m.in_dim, m.out_dim)
    return m.in_dim * np.einsum("ij,iajb->ab", s, c)


def apply_to_subsystem(m: OperatorMap, s: BipartiteState | np.ndarray, side: Side | str = Side.B, dims=None) -> np.ndarray:
    """``(I (x) L)(rho)`` for side B, ``(L (x) I)(rho)`` for side A."""
    if isinstance(s, BipartiteState):
        da, db = s.dims
        rho = s.rho
    else:
        rho = linalg.as_matrix(s)
        da, db = dims
    c = m.choi.reshape(m.in_dim, m.out_dim, m.in_dim, m.out_dim) * m.in_dim
    t = rho.reshape(da, db, da, db)
    if Side(side) is Side.B:
        if m.in_dim != db:
            raise DimensionMismatch(f"map in_dim {m.in_dim} != dim_b {db}")
        out = np.einsum("xiyj,iajb->xayb", t, c)
        return out.reshape(da * m.out_dim, da * m.out_dim)
    if m.in_dim != da:
        raise DimensionMismatch(f"map in_dim {m.in_dim} != dim_a {da}")
    out = np.einsum("ixjy,iajb->axby", t, c)
    return out.reshape(m.out_dim * db, m.out_dim * db)


def is_cp(m: OperatorMap) -> tuple[bool, np.ndarray]:
    """Complete positivity via the Choi spectrum; returns ``(verdict, spectrum)``."""
    eig = linalg.eigvalsh(m.choi)
    return bool(eig[0] >= -CP_TOL), eig


def kraus_from_choi(m: OperatorMap) -> KrausSet:
    """Kraus operators ``W_i = sqrt(lambda_i) V_i`` with ``(I (x) V_i) psi+ = psi_i``.

    Raises:
        NotCompletelyPositive: if the Choi matrix has a negative eigenvalue.
    """
    ok, _ = is_cp(m)
    if not ok:
        raise NotCompletelyPositive("choi matrix is not positive")
    eig = linalg.eigh(m.choi)
    ops = []
    for lam, vec in zip(eig.values, eig.vectors.T):
        if lam <= KRAUS_DROP_TOL:
            continue
        # psi_i = sum_{i,a} V[a, i] / sqrt(n) |i>|a>, so V = sqrt(n) * coeffs^T.
        v = np.sqrt(m.in_dim) * linalg.vec_to_matrix(vec, (m.in_dim, m.out_dim)).T
        ops.append(np.sqrt(lam) * v)
    return KrausSet(tuple(ops))


def map_from_kraus(ops: Sequence[np.ndarray]) -> OperatorMap:
    ops = [linalg.as_matrix(w) for w in ops]
    k, n = ops[0].shape
    return map_from_action(n, lambda x: sum(w @ x @ w.conj().T for w in ops), out_dim=k)


def compose(outer: OperatorMap, inner: OperatorMap) -> OperatorMap:
    """Choi matrix of ``outer o inner``."""
    if outer.in_dim != inner.out_dim:
        raise DimensionMismatch("cannot compose: dimension mismatch")
    return map_from_action(inner.in_dim, lambda x: apply_map(outer, apply_map(inner, x)), out_dim=outer.out_dim)


def identity_map(n: int) -> OperatorMap:
    return map_from_action(n, lambda x: x)


def transpose_map(n: int) -> OperatorMap:
    """Transposition in the computational basis."""
    return map_from_action(n, lambda x: x.T)


def reduction_map(n: int) -> OperatorMap:
    """``sigma -> I Tr(sigma) - sigma``."""
    return map_from_action(n, lambda x: np.eye(n) * np.trace(x) - x)


def unitary_map(u) -> OperatorMap:
    u = linalg.as_matrix(u)
    return map_from_action(u.shape[1], lambda x: u @ x @ u.conj().T, out_dim=u.shape[0])


def depolarizing_map(n: int, alpha: float) -> OperatorMap:
    """``sigma -> (1 - alpha) I Tr(sigma)/n + alpha sigma``."""
    return map_from_action(n, lambda x: (1 - alpha) * np.eye(n) * np.trace(x) / n + alpha * x)


def output_partial_transpose(m: OperatorMap) -> np.ndarray:
    return partial_transpose(m.choi, Side.B, dims=(m.in_dim, m.out_dim))


@dataclass
class DecompositionReport:
    """Outcome of checking ``Lambda = T o Gamma = Gamma' o T`` for the reduction map."""

    n: int
    choi_min_eigenvalue: float
    choi_trace: float
    pt_residual: float
    gamma_spectrum: np.ndarray
    gamma_is_cp: bool
    kraus_count: int
    kraus_residual: float
    t_gamma_residual: float
    gamma_prime_t_residual: float
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "choi_min_eigenvalue": self.choi_min_eigenvalue,
            "choi_trace": self.choi_trace,
            "pt_residual": self.pt_residual,
            "gamma_spectrum": self.gamma_spectrum.tolist(),
            "gamma_is_cp": self.gamma_is_cp,
            "kraus_count": self.kraus_count,
            "kraus_residual": self.kraus_residual,
            "t_gamma_residual": self.t_gamma_residual,
            "gamma_prime_t_residual": self.gamma_prime_t_residual,
            "checks": dict(self.checks),
            "passed": self.passed,
        }


def verify_decomposition(n: int, samples: int = 100, seed=0) -> DecompositionReport:
    """Check that the reduction map factors through transposition and a CP map."""
    _check_dim(n)
    lam = reduction_map(n)
    lam_eig = linalg.eigvalsh(lam.choi)

    expected_pt = (np.eye(n * n) - linalg.swap_operator(n)) / n
    pt_residual = float(np.abs(output_partial_transpose(lam) - expected_pt).max())

    gamma = compose(transpose_map(n), lam)
    gamma_cp, gamma_eig = is_cp(gamma)
    kraus = kraus_from_choi(gamma)
    kraus_prime = [np.conj(w) for w in kraus.operators]

    rng = _rng(seed)
    kraus_res = t_gamma_res = gp_t_res = 0.0
    for _ in range(samples):
        g = rng.standard_normal((n, n, 2)) @ np.array([1.0, 1.0j])
        sigma = g @ g.conj().T
        sigma /= np.trace(sigma)
        target = np.eye(n) * np.trace(sigma) - sigma
        gs = apply_map(gamma, sigma)
        kraus_res = max(kraus_res, float(np.abs(kraus(sigma) - gs).max()))
        t_gamma_res = max(t_gamma_res, float(np.abs(gs.T - target).max()))
        gp = sum(w @ sigma.T @ w.conj().T for w in kraus_prime)
        gp_t_res = max(gp_t_res, float(np.abs(gp - target).max()))

    rep = DecompositionReport(
        n=n,
        choi_min_eigenvalue=float(lam_eig[0]),
        choi_trace=float(np.trace(lam.choi).real),
        pt_residual=pt_residual,
        gamma_spectrum=gamma_eig,
        gamma_is_cp=gamma_cp,
        kraus_count=len(kraus),
        kraus_residual=kraus_res,
        t_gamma_residual=t_gamma_res,
        gamma_prime_t_residual=gp_t_res,
    )
    rep.checks = {
        "choi_min_eigenvalue": abs(rep.choi_min_eigenvalue - (1.0 / n - 1.0)) <= 1e-10,
        "choi_partial_transpose": pt_residual <= 1e-12,
        "gamma_is_cp": gamma_cp,
        "kraus_reconstruction": kraus_res <= 1e-9,
        "t_gamma_equals_lambda": t_gamma_res <= 1e-9,
        "gamma_prime_t_equals_lambda": gp_t_res <= 1e-9,
    }
    return rep
