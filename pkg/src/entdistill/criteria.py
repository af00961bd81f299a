"""Separability criteria: reduction, PPT, Renyi-entropic, fully entangled fraction."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import linalg
from .errors import DimensionMismatch, DimensionOverflow, NotDensityMatrix
from .states import BipartiteState, PureState, Side, partial_trace, partial_transpose, schmidt

VERDICT_TOL = 1e-9
TIE_TOL = 1e-12


class Criterion(str, Enum):
    REDUCTION_A = "reduction_A"
    REDUCTION_B = "reduction_B"
    PPT = "ppt"
    ENTROPIC = "entropic"


@dataclass(frozen=True)
class CriterionReport:
    """Verdict of one separability test.

    For spectral criteria ``spectrum`` holds the ascending eigenvalues of
    the tested operator. For entropic ones it holds the single conditional
    entropy value, and ``alpha``/``conditional`` say which one.
    """

    criterion: Criterion
    satisfied: bool
    spectrum: np.ndarray
    witness: np.ndarray | None = None
    borderline: bool = False
    alpha: float | None = None
    conditional: str | None = None

    @property
    def min_eigenvalue(self) -> float:
        return float(self.spectrum[0])

    @property
    def name(self) -> str:
        if self.criterion is Criterion.ENTROPIC:
            a = "inf" if np.isinf(self.alpha) else f"{self.alpha:g}"
            return f"entropic_{a}({self.conditional})"
        return self.criterion.value

    def to_dict(self) -> dict:
        d = {
            "criterion": self.name,
            "satisfied": self.satisfied,
            "min_eigenvalue": self.min_eigenvalue,
            "witness": None
            if self.witness is None
            else [[float(z.real), float(z.imag)] for z in self.witness],
        }
        if self.borderline:
            d["borderline"] = True
        return d


def _spectral_report(criterion: Criterion, op: np.ndarray) -> CriterionReport:
    eig = linalg.eigh(op)
    lo = eig.min
    satisfied = lo >= -VERDICT_TOL
    witness = None
    if not satisfied:
        # Ascending order: the first index within TIE_TOL of the minimum is vectors[:, 0].
        w = eig.vector(0)
        witness = w / np.linalg.norm(w)
    return CriterionReport(
        criterion=criterion,
        satisfied=satisfied,
        spectrum=eig.values,
        witness=witness,
        borderline=bool(satisfied and lo < 0.0),
    )


def reduction_operator(s: BipartiteState, side: Side | str = Side.A) -> np.ndarray:
    """``rho_A (x) I - rho`` for side A, ``I (x) rho_B - rho`` for side B."""
    if Side(side) is Side.A:
        return np.kron(partial_trace(s, Side.B), np.eye(s.dim_b)) - s.rho
    return np.kron(np.eye(s.dim_a), partial_trace(s, Side.A)) - s.rho


def reduction_check(s: BipartiteState, side: Side | str = Side.A) -> CriterionReport:
    crit = Criterion.REDUCTION_A if Side(side) is Side.A else Criterion.REDUCTION_B
    return _spectral_report(crit, reduction_operator(s, side))


def ppt_check(s: BipartiteState) -> CriterionReport:
    return _spectral_report(Criterion.PPT, partial_transpose(s, Side.B))


def renyi_entropy(m, alpha: float) -> float:
    """Renyi entropy in nats for ``alpha`` in {1, 2, inf}."""
    if alpha not in (1, 2) and not np.isinf(alpha):
        raise ValueError(f"alpha must be 1, 2 or inf, got {alpha!r}")
    mat = linalg.as_matrix(m)
    if linalg.hermiticity_defect(mat) > linalg.HERMITIAN_TOL:
        raise NotDensityMatrix("not Hermitian")
    lam = np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))
    tr = lam.sum()
    if abs(tr - 1.0) > 1e-10 or lam[0] < -1e-9:
        raise NotDensityMatrix("not a unit-trace positive matrix")
    lam = np.clip(lam, 0.0, None)
    if alpha == 1:
        nz = lam[lam > 0.0]
        return float(-(nz * np.log(nz)).sum())
    if alpha == 2:
        return float(-np.log((lam**2).sum()))
    return float(-np.log(lam[-1]))


def entropic_check(s: BipartiteState, alpha: float) -> tuple[CriterionReport, CriterionReport]:
    """Reports for ``S(A|B) >= 0`` and ``S(B|A) >= 0``, in that order."""
    total = renyi_entropy(s.rho, alpha)
    s_a = renyi_entropy(partial_trace(s, Side.B), alpha)
    s_b = renyi_entropy(partial_trace(s, Side.A), alpha)
    out = []
    for label, value in (("A|B", total - s_b), ("B|A", total - s_a)):
        ok = value >= -VERDICT_TOL
        out.append(
            CriterionReport(
                criterion=Criterion.ENTROPIC,
                satisfied=ok,
                spectrum=np.array([value]),
                borderline=bool(ok and value < 0.0),
                alpha=float(alpha),
                conditional=label,
            )
        )
    return out[0], out[1]


def fef_pure(psi: PureState) -> float:
    """Fully entangled fraction of a pure state, ``(sum_i c_i)^2 / N``."""
    if psi.dim_a != psi.dim_b:
        raise DimensionMismatch(f"need an N x N system, got {psi.dim_a}x{psi.dim_b}")
    c = schmidt(psi).coefficients
    return float(c.sum() ** 2 / psi.dim_a)


def regroup_pair(s1: BipartiteState, s2: BipartiteState) -> BipartiteState:
    """``rho_1 (x) rho_2`` as a state on (A1 A2) (x) (B1 B2).

    The factor order is (a1, b1, a2, b2) before regrouping; the composite
    indices afterwards are ``a1 * dA2 + a2`` and ``b1 * dB2 + b2``.
    """
    a1, b1 = s1.dims
    a2, b2 = s2.dims
    d = a1 * a2 * b1 * b2
    if d > linalg.MAX_MATRIX_DIM:
        raise DimensionOverflow(f"regrouped operator would be {d}x{d}")
    t = np.kron(s1.rho, s2.rho).reshape(a1, b1, a2, b2, a1, b1, a2, b2)
    t = t.transpose(0, 2, 1, 3, 4, 6, 5, 7)
    return BipartiteState(a1 * a2, b1 * b2, t.reshape(d, d))


def collective_reduction_check(
    s1: BipartiteState, s2: BipartiteState, side: Side | str = Side.A
) -> CriterionReport:
    return reduction_check(regroup_pair(s1, s2), side)
