"""Dense complex matrix kernel.

Thin, validated wrappers over numpy/LAPACK. Every routine accepts anything
``np.asarray`` understands and returns ``complex128``/``float64`` arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotHermitian, NotSquare, ShapeMismatch

HERMITIAN_TOL = 1e-10
# Largest operator side length handled anywhere in the library (N = 8 for N^4).
MAX_MATRIX_DIM = 4096


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite 2D complex array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ShapeMismatch(f"expected a 2D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


@dataclass(frozen=True)
class Spectrum:
    """Eigen-decomposition of a Hermitian matrix.

    ``values`` are real and ascending; ``vectors[:, i]`` is the unit
    eigenvector paired with ``values[i]``.
    """

    values: np.ndarray
    vectors: np.ndarray

    @property
    def min(self) -> float:
        return float(self.values[0])

    def vector(self, i: int = 0) -> np.ndarray:
        return self.vectors[:, i]


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def dagger(a) -> np.ndarray:
    return as_matrix(a).conj().T


def trace(a) -> complex:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise NotSquare(f"trace of non-square matrix {m.shape}")
    return complex(np.trace(m))


def frob_dist(a, b) -> float:
    return float(np.linalg.norm(as_matrix(a) - as_matrix(b), ord="fro"))


def op_norm(a) -> float:
    """Operator (spectral) norm, the largest singular value."""
    return float(np.linalg.norm(as_matrix(a), ord=2))


def hermiticity_defect(h) -> float:
    m = as_matrix(h)
    if m.shape[0] != m.shape[1]:
        raise NotSquare(f"expected a square matrix, got {m.shape}")
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def eigh(h, tol: float = HERMITIAN_TOL) -> Spectrum:
    """Spectrum of a Hermitian matrix.

    Inputs within ``tol`` (max absolute entry of ``h - h^dagger``) of being
    Hermitian are symmetrized before decomposition.

    Raises:
        NotHermitian: if the defect exceeds ``tol``.
    """
    m = as_matrix(h)
    defect = hermiticity_defect(m)
    if defect > tol:
        raise NotHermitian(f"max |h - h^dagger| = {defect:.3e} exceeds {tol:.1e}")
    m = 0.5 * (m + m.conj().T)
    values, vectors = np.linalg.eigh(m)
    return Spectrum(values=values, vectors=vectors)


def eigvalsh(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = as_matrix(h)
    defect = hermiticity_defect(m)
    if defect > tol:
        raise NotHermitian(f"max |h - h^dagger| = {defect:.3e} exceeds {tol:.1e}")
    return np.linalg.eigvalsh(0.5 * (m + m.conj().T))


def svd(a) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(s, u, w)`` with ``a = sum_i s[i] u[:, i] w[:, i]^dagger``.

    Singular values are non-negative and descending. Note that ``w`` holds the
    right singular vectors as columns (numpy returns their adjoint).
    """
    u, s, vh = np.linalg.svd(as_matrix(a))
    return s, u, vh.conj().T


def vec_to_matrix(v, shape: tuple[int, int]) -> np.ndarray:
    """Coefficient matrix ``a[m, n]`` of ``psi = sum a_mn |m>|n>``."""
    arr = np.asarray(v, dtype=np.complex128).ravel()
    rows, cols = shape
    if arr.size != rows * cols:
        raise ShapeMismatch(f"vector of length {arr.size} cannot fill {rows}x{cols}")
    return arr.reshape(rows, cols).copy()


def matrix_to_vec(a) -> np.ndarray:
    return as_matrix(a).ravel().copy()


def swap_operator(n: int) -> np.ndarray:
    """The swap ``V`` on C^n (x) C^n, ``V |i>|j> = |j>|i>``."""
    v = np.zeros((n * n, n * n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            v[j * n + i, i * n + j] = 1.0
    return v


def is_psd(h, tol: float = 1e-9) -> bool:
    return bool(eigvalsh(h)[0] >= -tol)
