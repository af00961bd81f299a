"""Bipartite density matrices and the named state families.

Basis convention: the composite index of ``|i>_A (x) |j>_B`` is
``i * dim_b + j`` and basis labels start at 0, so the textbook state
``|1>|2>`` is ``|0>|1>`` here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import linalg
from .errors import (
    BadDimension,
    DimensionMismatch,
    NotDensityMatrix,
    OutOfRange,
    ShapeMismatch,
)

TRACE_TOL = 1e-10
PSD_TOL = 1e-9


class Side(str, Enum):
    A = "A"
    B = "B"


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


def validate_density(rho, what: str = "density matrix") -> np.ndarray:
    """Return ``rho`` symmetrized, or raise ``NotDensityMatrix``."""
    m = linalg.as_matrix(rho)
    if m.shape[0] != m.shape[1]:
        raise NotDensityMatrix(f"{what} is not square: {m.shape}")
    if linalg.hermiticity_defect(m) > linalg.HERMITIAN_TOL:
        raise NotDensityMatrix(f"{what} is not Hermitian")
    m = 0.5 * (m + m.conj().T)
    tr = np.trace(m).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise NotDensityMatrix(f"{what} has trace {tr!r}, expected 1")
    lo = np.linalg.eigvalsh(m)[0]
    if lo < -PSD_TOL * tr:
        raise NotDensityMatrix(f"{what} has negative eigenvalue {lo:.3e}")
    return m


@dataclass(frozen=True)
class BipartiteState:
    """A density matrix on C^dim_a (x) C^dim_b."""

    dim_a: int
    dim_b: int
    rho: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.dim_a < 1 or self.dim_b < 1:
            raise BadDimension(f"dimensions must be positive, got {self.dim_a}x{self.dim_b}")
        m = linalg.as_matrix(self.rho)
        d = self.dim_a * self.dim_b
        if m.shape != (d, d):
            raise ShapeMismatch(f"rho has shape {m.shape}, expected {(d, d)}")
        object.__setattr__(self, "rho", _frozen(validate_density(m, "state")))

    @property
    def dims(self) -> tuple[int, int]:
        return (self.dim_a, self.dim_b)

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    def tensor(self) -> np.ndarray:
        """``rho`` as a rank-4 array indexed ``[a, b, a', b']``."""
        return self.rho.reshape(self.dim_a, self.dim_b, self.dim_a, self.dim_b)

    def reduced(self, keep: Side | str) -> np.ndarray:
        return partial_trace(self, over=Side.B if Side(keep) is Side.A else Side.A)

    def conjugated(self, u_a, u_b) -> "BipartiteState":
        """State after the local unitary ``u_a (x) u_b``."""
        u = np.kron(linalg.as_matrix(u_a), linalg.as_matrix(u_b))
        return BipartiteState(self.dim_a, self.dim_b, u @ self.rho @ u.conj().T)

    def __eq__(self, other):
        if not isinstance(other, BipartiteState):
            return NotImplemented
        return self.dims == other.dims and np.array_equal(self.rho, other.rho)

    __hash__ = None


@dataclass(frozen=True)
class PureState:
    dim_a: int
    dim_b: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=np.complex128).ravel()
        if v.size != self.dim_a * self.dim_b:
            raise ShapeMismatch(f"{v.size} amplitudes for a {self.dim_a}x{self.dim_b} system")
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"pure state has norm {norm!r}")
        v = _frozen(v)
        object.__setattr__(self, "amplitudes", v)

    @classmethod
    def normalized(cls, dim_a: int, dim_b: int, amplitudes) -> "PureState":
        v = np.asarray(amplitudes, dtype=np.complex128).ravel()
        return cls(dim_a, dim_b, v / np.linalg.norm(v))

    def coefficients(self) -> np.ndarray:
        """Matrix ``a[m, n]`` with ``psi = sum a_mn |m>|n>``."""
        return linalg.vec_to_matrix(self.amplitudes, (self.dim_a, self.dim_b))

    def projector(self) -> BipartiteState:
        v = self.amplitudes
        return BipartiteState(self.dim_a, self.dim_b, np.outer(v, v.conj()))


@dataclass(frozen=True)
class SchmidtDecomposition:
    coefficients: np.ndarray
    basis_a: np.ndarray
    basis_b: np.ndarray

    def reconstruct(self) -> np.ndarray:
        k = len(self.coefficients)
        return sum(
            self.coefficients[i] * np.kron(self.basis_a[:, i], self.basis_b[:, i]) for i in range(k)
        )


def _check_dim(n: int) -> None:
    if int(n) != n or n < 2:
        raise BadDimension(f"dimension must be an integer >= 2, got {n!r}")


def psi_plus(n: int) -> PureState:
    """Maximally entangled vector ``(1/sqrt n) sum_i |ii>``."""
    _check_dim(n)
    v = np.zeros(n * n, dtype=np.complex128)
    v[:: n + 1] = 1.0 / np.sqrt(n)
    return PureState(n, n, v)


def p_plus(n: int) -> np.ndarray:
    v = psi_plus(n).amplitudes
    return np.outer(v, v.conj())


def singlet() -> PureState:
    """``(|01> - |10>)/sqrt 2``."""
    return PureState(2, 2, np.array([0, 1, -1, 0]) / np.sqrt(2))


def product_pure(phi_a, phi_b) -> PureState:
    a = np.asarray(phi_a, dtype=np.complex128)
    b = np.asarray(phi_b, dtype=np.complex128)
    return PureState.normalized(a.size, b.size, np.kron(a, b))


def product_state(rho_a, rho_b) -> BipartiteState:
    ra = linalg.as_matrix(rho_a)
    rb = linalg.as_matrix(rho_b)
    return BipartiteState(ra.shape[0], rb.shape[0], np.kron(ra, rb))


def maximally_mixed(n: int, m: int | None = None) -> BipartiteState:
    m = n if m is None else m
    return BipartiteState(n, m, np.eye(n * m) / (n * m))


def partial_trace(s: BipartiteState, over: Side | str) -> np.ndarray:
    """Reduced density matrix after tracing out ``over``."""
    t = s.tensor()
    if Side(over) is Side.B:
        return np.einsum("ijkj->ik", t)
    return np.einsum("ijil->jl", t)


def partial_transpose(s: BipartiteState | np.ndarray, side: Side | str = Side.B, dims=None) -> np.ndarray:
    """Partial transpose ``rho^{T_X}``; may return a non-positive operator.

    Accepts a ``BipartiteState`` or a raw square matrix with ``dims``.
    """
    if isinstance(s, BipartiteState):
        da, db = s.dims
        m = s.rho
    else:
        m = linalg.as_matrix(s)
        da, db = dims
    t = m.reshape(da, db, da, db)
    if Side(side) is Side.B:
        t = t.transpose(0, 3, 2, 1)
    else:
        t = t.transpose(2, 1, 0, 3)
    return t.reshape(da * db, da * db).copy()


def werner(n: int, phi: float) -> BipartiteState:
    """U(x)U-invariant state ``((n - phi) I + (n phi - 1) V) / (n^3 - n)``."""
    _check_dim(n)
    if not -1.0 <= phi <= 1.0:
        raise OutOfRange(f"phi must lie in [-1, 1], got {phi!r}")
    v = linalg.swap_operator(n)
    rho = ((n - phi) * np.eye(n * n) + (n * phi - 1) * v) / (n**3 - n)
    return BipartiteState(n, n, rho)


def werner_alpha_from_phi(phi: float) -> float:
    """Singlet weight of the two-qubit Werner state, ``W_2 = (1-a) I/4 + a P_singlet``."""
    return (1.0 - 2.0 * phi) / 3.0


def alpha_from_fidelity(n: int, f: float) -> float:
    return (n * n * f - 1.0) / (n * n - 1.0)


def fidelity_from_alpha(n: int, alpha: float) -> float:
    return ((n * n - 1.0) * alpha + 1.0) / (n * n)


def isotropic_alpha(n: int, alpha: float) -> BipartiteState:
    """``(1 - alpha) I/n^2 + alpha P+`` for ``-1/(n^2-1) <= alpha <= 1``."""
    _check_dim(n)
    lo = -1.0 / (n * n - 1)
    if not lo - 1e-15 <= alpha <= 1.0 + 1e-15:
        raise OutOfRange(f"alpha must lie in [{lo}, 1], got {alpha!r}")
    rho = (1.0 - alpha) * np.eye(n * n) / (n * n) + alpha * p_plus(n)
    return BipartiteState(n, n, rho)


def isotropic(n: int, f: float) -> BipartiteState:
    """U(x)U*-invariant state with fidelity ``f`` to ``psi_plus(n)``."""
    _check_dim(n)
    if not 0.0 <= f <= 1.0:
        raise OutOfRange(f"fidelity must lie in [0, 1], got {f!r}")
    return isotropic_alpha(n, alpha_from_fidelity(n, f))


def fidelity(s: BipartiteState) -> float:
    """Overlap ``Tr(rho P+)``."""
    if s.dim_a != s.dim_b:
        raise DimensionMismatch(f"fidelity needs a square system, got {s.dim_a}x{s.dim_b}")
    n = s.dim_a
    idx = np.arange(n) * (n + 1)
    return float(s.rho[np.ix_(idx, idx)].sum().real / n)


def embed_diag(rho_n) -> BipartiteState:
    """Image of a single-system state under ``|i> -> |i>|i>``."""
    m = validate_density(rho_n, "embedded state")
    n = m.shape[0]
    out = np.zeros((n * n, n * n), dtype=np.complex128)
    idx = np.arange(n) * (n + 1)
    out[np.ix_(idx, idx)] = m
    return BipartiteState(n, n, out)


def sigma_example(p: float) -> BipartiteState:
    """Two-qutrit mixture ``p P+ + (1 - p) |0><0| (x) |1><1|``, ``0 < p <= 1/3``."""
    if not 0.0 < p <= 1.0 / 3.0 + 1e-15:
        raise OutOfRange(f"p must lie in (0, 1/3], got {p!r}")
    p12 = np.zeros((9, 9), dtype=np.complex128)
    p12[1, 1] = 1.0
    return BipartiteState(3, 3, p * p_plus(3) + (1.0 - p) * p12)


def schmidt(psi: PureState) -> SchmidtDecomposition:
    s, u, w = linalg.svd(psi.coefficients())
    # a = sum s u w^dagger, so the B-side vectors are conj(w).
    return SchmidtDecomposition(coefficients=s, basis_a=u, basis_b=w.conj())


def _rng(seed) -> np.random.Generator:
    """PCG64 generator; ``seed`` may be an int, SeedSequence or a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_pure_vector(d: int, seed) -> np.ndarray:
    rng = _rng(seed)
    z = rng.standard_normal((d, 2)) @ np.array([1.0, 1.0j])
    return z / np.linalg.norm(z)


def random_density(n: int, seed, rank: int | None = None, dim_b: int | None = None) -> BipartiteState:
    """Random state ``G G^dagger / Tr`` from a complex Ginibre ``G``.

    With ``rank = None`` the state is Hilbert-Schmidt distributed.
    """
    m = n if dim_b is None else dim_b
    if n < 2 or m < 1:
        raise BadDimension(f"bad dimensions {n}x{m}")
    d = n * m
    k = d if rank is None else int(rank)
    if not 1 <= k <= d:
        raise OutOfRange(f"rank must lie in [1, {d}], got {rank!r}")
    rng = _rng(seed)
    g = rng.standard_normal((d, k, 2)) @ np.array([1.0, 1.0j])
    rho = g @ g.conj().T
    return BipartiteState(n, m, rho / np.trace(rho).real)


def random_separable(n: int, terms: int, seed, dim_b: int | None = None) -> BipartiteState:
    """Convex mixture of ``terms`` random pure product states."""
    m = n if dim_b is None else dim_b
    if terms < 1:
        raise OutOfRange("terms must be >= 1")
    rng = _rng(seed)
    weights = rng.dirichlet(np.ones(terms))
    rho = np.zeros((n * m, n * m), dtype=np.complex128)
    for w in weights:
        v = np.kron(random_pure_vector(n, rng), random_pure_vector(m, rng))
        rho += w * np.outer(v, v.conj())
    return BipartiteState(n, m, rho / np.trace(rho).real)
