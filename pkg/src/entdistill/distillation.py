"""One-sided filtering, U(x)U* twirling and the generalized-XOR recurrence.

The protocol: a state violating ``rho_A (x) I - rho >= 0`` is filtered with
a local operator built from the violating eigenvector, which lifts its
fidelity above ``1/N``. Twirling then maps it onto the isotropic family,
and bilateral generalized-XOR rounds push ``alpha`` towards 1.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import linalg
from .criteria import reduction_check
from .errors import (
    DimensionMismatch,
    DimensionOverflow,
    NotViolating,
    OutOfRange,
    ZeroProbability,
)
from .states import (
    BipartiteState,
    Side,
    _check_dim,
    _rng,
    alpha_from_fidelity,
    fidelity,
    fidelity_from_alpha,
    isotropic,
    isotropic_alpha,
)

STALL_TOL = 1e-12
DEFAULT_HANDOFF_FIDELITY = 0.95


@dataclass(frozen=True)
class FilterOperator:
    """Local filter ``A`` acting as ``rho -> (A^dagger (x) I) rho (A (x) I)``."""

    matrix: np.ndarray
    side: Side = Side.A

    def __post_init__(self):
        m = linalg.as_matrix(self.matrix).copy()
        if linalg.op_norm(m) > 1 + 1e-12:
            raise ValueError("filter must satisfy ||A|| <= 1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def norm(self) -> float:
        return linalg.op_norm(self.matrix)

    def scaled(self, c: float) -> "FilterOperator":
        return FilterOperator(c * self.matrix, self.side)


def _fix_phase(a: np.ndarray) -> np.ndarray:
    flat = a.ravel()
    k = int(np.argmax(np.abs(flat) > np.abs(flat).max() * (1 - 1e-9)))
    return a * (abs(flat[k]) / flat[k])


def swap_parties(s: BipartiteState) -> BipartiteState:
    """Relabel A <-> B. Leaves ``P+`` and hence the fidelity unchanged."""
    t = s.tensor().transpose(1, 0, 3, 2)
    return BipartiteState(s.dim_b, s.dim_a, t.reshape(s.dim, s.dim))


def filter_from_state(s: BipartiteState, side: Side | str = Side.A) -> FilterOperator:
    """Filter from the most negative eigenvector of the reduction operator.

    The eigenvector ``psi = sum a_mn |m>|n>`` equals ``(A (x) I) psi+`` for
    ``A = sqrt(N) a``; the result is rescaled to unit operator norm. For
    ``side="B"`` the filter is built for the party-swapped state and acts on
    Bob's particle.

    Raises:
        NotViolating: if the criterion on ``side`` is satisfied.
    """
    if s.dim_a != s.dim_b:
        raise DimensionMismatch("filtering needs an N x N system")
    side = Side(side)
    work = s if side is Side.A else swap_parties(s)
    rep = reduction_check(work, Side.A)
    if rep.satisfied:
        raise NotViolating(f"reduction criterion on side {side.value} is satisfied")
    n = s.dim_a
    a = np.sqrt(n) * linalg.vec_to_matrix(rep.witness, (n, n))
    a = _fix_phase(a / linalg.op_norm(a))
    return FilterOperator(a, side)


def apply_filter(s: BipartiteState, f: FilterOperator) -> tuple[BipartiteState, float]:
    """Filtered, renormalized state and the probability ``Tr(rho A A^dagger (x) I)``."""
    a = f.matrix
    if s.dim_a != s.dim_b or a.shape != (s.dim_a, s.dim_a):
        raise DimensionMismatch("filter and state dimensions differ")
    work = s if f.side is Side.A else swap_parties(s)
    k = np.kron(a, np.eye(work.dim_b))
    out = k.conj().T @ work.rho @ k
    prob = float(np.trace(out).real)
    if prob <= 1e-14:
        raise ZeroProbability(f"filter success probability {prob:.3e}")
    res = BipartiteState(work.dim_a, work.dim_b, out / prob)
    if f.side is Side.B:
        res = swap_parties(res)
    return res, prob


def haar_unitaries(n: int, count: int, seed) -> np.ndarray:
    """``count`` Haar-random ``n x n`` unitaries, shape ``(count, n, n)``.

    QR of a complex Ginibre matrix with the phases of ``diag(R)`` moved into
    ``Q``. Each unitary consumes ``2 n^2`` normals from the stream, so the
    first unitary for a seed matches ``haar_unitary(n, seed)``.
    """
    rng = _rng(seed)
    z = rng.standard_normal((count, n, n, 2)) @ np.array([1.0, 1.0j])
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=1, axis2=2)
    return q * (d / np.abs(d))[:, None, :]


def haar_unitary(n: int, seed) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    return haar_unitaries(n, 1, seed)[0]


def twirl_exact(s: BipartiteState) -> BipartiteState:
    """Average of ``U (x) U* rho U^dagger (x) U*^dagger`` over the Haar measure.

    The result is the isotropic state with the same fidelity.
    """
    if s.dim_a != s.dim_b:
        raise DimensionMismatch("twirling needs an N x N system")
    return isotropic(s.dim_a, float(np.clip(fidelity(s), 0.0, 1.0)))


@dataclass(frozen=True)
class TwirlEstimate:
    state: BipartiteState
    samples: int
    distance_to_exact: float


def twirl_monte_carlo(s: BipartiteState, samples: int, seed, chunk: int = 512) -> TwirlEstimate:
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if s.dim_a != s.dim_b:
        raise DimensionMismatch("twirling needs an N x N system")
    n = s.dim_a
    rng = _rng(seed)
    t = s.tensor()
    acc = np.zeros((n, n, n, n), dtype=np.complex128)
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        u = haar_unitaries(n, m, rng)
        uc = u.conj()
        # Factor by factor: U on A, U* on B (ket side), then their adjoints (bra side).
        x = np.einsum("sai,ijkl->sajkl", u, t)
        x = np.einsum("sbj,sajkl->sabkl", uc, x)
        x = np.einsum("sck,sabkl->sabcl", uc, x)
        acc += np.einsum("sdl,sabcl->abcd", u, x)
        done += m
    est = BipartiteState(n, n, acc.reshape(n * n, n * n) / samples)
    return TwirlEstimate(est, samples, linalg.frob_dist(est.rho, twirl_exact(s).rho))


def gxor_unitary(n: int) -> np.ndarray:
    """Permutation ``|k>|l> -> |k>|(l + k) mod n>`` (source first)."""
    _check_dim(n)
    g = np.zeros((n * n, n * n), dtype=np.complex128)
    for k in range(n):
        for l in range(n):
            g[k * n + (l + k) % n, k * n + l] = 1.0
    return g


def _check_alpha(n: int, alpha: float) -> None:
    lo = -1.0 / (n * n - 1)
    if not lo - 1e-15 <= alpha <= 1.0 + 1e-15:
        raise OutOfRange(f"alpha must lie in [{lo}, 1] for n={n}, got {alpha!r}")


def recurrence_exact(n: int, alpha: float) -> float:
    """Isotropic parameter after one successful recurrence round."""
    _check_dim(n)
    _check_alpha(n, alpha)
    return alpha * ((n * (n + 1) - 2) * alpha + 2) / ((n + 1) * (1 + (n - 1) * alpha**2))


def recurrence_simulated(n: int, alpha: float) -> tuple[float, float]:
    """One recurrence round by explicit matrix simulation.

    Builds ``rho_alpha (x) rho_alpha`` on (A1 B1)(A2 B2), applies the
    generalized XOR on A1A2 and on B1B2 (pair 1 is the source), keeps the
    branch where the target qudits agree in the computational basis, traces
    the target pair out and twirls. Returns ``(alpha_out, probability)``.
    """
    _check_dim(n)
    _check_alpha(n, alpha)
    d = n**4
    if d > linalg.MAX_MATRIX_DIM:
        raise DimensionOverflow(f"n={n} needs a {d}x{d} operator")
    rho = isotropic_alpha(n, alpha).rho
    joint = np.kron(rho, rho).reshape((n,) * 8)
    # (a1, b1, a2, b2) -> (a1, a2, b1, b2) on both ket and bra.
    joint = joint.transpose(0, 2, 1, 3, 4, 6, 5, 7).reshape(d, d)
    g = gxor_unitary(n)
    u = np.kron(g, g)
    joint = u @ joint @ u.conj().T
    agree = np.zeros((n, n, n, n))
    for k in range(n):
        agree[:, k, :, k] = 1.0
    proj = np.diag(agree.ravel()).astype(np.complex128)
    kept = proj @ joint @ proj
    prob = float(np.trace(kept).real)
    # Axes (a1, a2, b1, b2 | a1', a2', b1', b2'); trace out A2 and B2.
    t = kept.reshape((n,) * 8)
    source = np.einsum("ixjykxly->ijkl", t).reshape(n * n, n * n) / prob
    f = float(np.real(np.trace(source @ _pplus(n))))
    return alpha_from_fidelity(n, f), prob


def _pplus(n: int) -> np.ndarray:
    v = np.zeros(n * n)
    v[:: n + 1] = 1.0 / np.sqrt(n)
    return np.outer(v, v)


class Outcome(str, Enum):
    REACHED_TARGET = "ReachedTarget"
    STALLED = "StalledBelowThreshold"
    NOT_VIOLATING = "NotViolating"
    ROUND_LIMIT = "RoundLimit"


@dataclass(frozen=True)
class RoundRecord:
    round: int
    alpha_in: float
    alpha_out: float
    fidelity_out: float
    p_success: float
    expected_pairs: float
    dim: int
    step: str = "recurrence"


CSV_COLUMNS = ("round", "alpha_in", "alpha_out", "fidelity_out", "p_success", "expected_pairs", "dim", "step")


@dataclass
class DistillationTrace:
    outcome: Outcome
    dim: int
    initial_fidelity: float
    rounds: list[RoundRecord] = field(default_factory=list)
    filter: FilterOperator | None = None
    filter_probability: float | None = None
    filtered_fidelity: float | None = None
    twirled_alpha: float | None = None
    target_fidelity: float | None = None

    @property
    def final_fidelity(self) -> float:
        if self.rounds:
            return self.rounds[-1].fidelity_out
        if self.twirled_alpha is not None:
            return fidelity_from_alpha(self.dim, self.twirled_alpha)
        return self.initial_fidelity

    def fidelities(self) -> list[float]:
        return [r.fidelity_out for r in self.rounds]

    def to_dict(self) -> dict:
        f = None
        if self.filter is not None:
            f = {
                "side": self.filter.side.value,
                "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in self.filter.matrix],
            }
        return {
            "outcome": self.outcome.value,
            "dim": self.dim,
            "target_fidelity": self.target_fidelity,
            "initial_fidelity": self.initial_fidelity,
            "filter": f,
            "filter_probability": self.filter_probability,
            "filtered_fidelity": self.filtered_fidelity,
            "twirled_alpha": self.twirled_alpha,
            "rounds": [r.__dict__.copy() for r in self.rounds],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rounds:
            w.writerow([repr(getattr(r, c)) if isinstance(getattr(r, c), float) else getattr(r, c) for c in CSV_COLUMNS])
        return buf.getvalue()


def project_to_qubits(s: BipartiteState) -> tuple[BipartiteState, float]:
    """Project both parties onto span{|0>, |1>} and renormalize."""
    n = s.dim_a
    t = s.tensor()[:2, :2, :2, :2].reshape(4, 4)
    prob = float(np.trace(t).real)
    if prob <= 1e-14:
        raise ZeroProbability("projection onto the qubit subspace failed")
    return BipartiteState(2, 2, t / prob), prob


def distill_run(
    s: BipartiteState,
    target_fidelity: float,
    max_rounds: int = 50,
    handoff_fidelity: float | None = DEFAULT_HANDOFF_FIDELITY,
) -> DistillationTrace:
    """Filter (when needed), twirl, then iterate recurrence rounds.

    ``expected_pairs`` counts raw input pairs consumed per output pair:
    ``1/q`` for a filter succeeding with probability ``q``, then times
    ``2/p`` for each recurrence round and ``1/p`` for the qubit hand-off.
    Pass ``handoff_fidelity=None`` to stay at dimension N.
    """
    if s.dim_a != s.dim_b:
        raise DimensionMismatch("distillation needs an N x N system")
    n = s.dim_a
    if not 1.0 / n < target_fidelity < 1.0:
        raise OutOfRange(f"target fidelity must lie in (1/{n}, 1)")
    f0 = fidelity(s)
    trace = DistillationTrace(outcome=Outcome.STALLED, dim=n, initial_fidelity=f0, target_fidelity=target_fidelity)

    cost = 1.0
    state = s
    boundary = abs(f0 - 1.0 / n) <= STALL_TOL
    if f0 <= 1.0 / n + STALL_TOL and not boundary:
        for side in (Side.A, Side.B):
            if not reduction_check(s if side is Side.A else swap_parties(s), Side.A).satisfied:
                trace.filter = filter_from_state(s, side)
                break
        if trace.filter is None:
            trace.outcome = Outcome.NOT_VIOLATING
            return trace
        state, q = apply_filter(s, trace.filter)
        trace.filter_probability = q
        trace.filtered_fidelity = fidelity(state)
        cost = 1.0 / q

    alpha = alpha_from_fidelity(n, float(np.clip(fidelity(state), 0.0, 1.0)))
    trace.twirled_alpha = alpha
    dim = n
    if alpha <= 1.0 / (n + 1) + STALL_TOL:
        trace.outcome = Outcome.STALLED
        return trace

    for k in range(max_rounds):
        f = fidelity_from_alpha(dim, alpha)
        if f >= target_fidelity:
            trace.outcome = Outcome.REACHED_TARGET
            return trace
        if handoff_fidelity is not None and dim > 2 and f >= handoff_fidelity:
            q2, p = project_to_qubits(isotropic_alpha(dim, alpha))
            new_alpha = alpha_from_fidelity(2, fidelity(q2))
            cost /= p
            dim = 2
            trace.rounds.append(
                RoundRecord(k, alpha, new_alpha, fidelity_from_alpha(2, new_alpha), p, cost, 2, "handoff")
            )
            alpha = new_alpha
            continue
        new_alpha = recurrence_exact(dim, alpha)
        if new_alpha - alpha < STALL_TOL:
            trace.outcome = Outcome.STALLED
            return trace
        _, p = recurrence_simulated(dim, alpha)
        cost *= 2.0 / p
        trace.rounds.append(
            RoundRecord(k, alpha, new_alpha, fidelity_from_alpha(dim, new_alpha), p, cost, dim)
        )
        alpha = new_alpha

    trace.outcome = (
        Outcome.REACHED_TARGET if fidelity_from_alpha(dim, alpha) >= target_fidelity else Outcome.ROUND_LIMIT
    )
    return trace
