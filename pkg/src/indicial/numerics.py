"""Tolerance-governed linear algebra shared by the other modules.

Everything here works on small dense complex matrices.  Rank and sign
decisions are made against the thresholds carried by :class:`Tolerances`;
callers never pass raw epsilons around.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NotHermitian, SingularConstantTerm


@dataclass(frozen=True)
class Tolerances:
    """Thresholds for every numerical decision made by the package.

    rank_rel
        Relative singular value cutoff used for ranks and nullspaces.
    zero_eig_abs
        Eigenvalues within ``zero_eig_abs * max(1, spectral radius)`` of zero
        count as zero in :func:`inertia`.
    root_cluster
        Eigenvalues of the linearization closer than this are one root.
    line_snap
        Roots whose imaginary part is this close to ``0``, ``-m/2`` or ``-m``
        are placed exactly on that line.
    """

    rank_rel: float = 1e-9
    zero_eig_abs: float = 1e-8
    root_cluster: float = 1e-2
    line_snap: float = 5e-2

    def __post_init__(self):
        for name in ("rank_rel", "zero_eig_abs", "root_cluster", "line_snap"):
            if not getattr(self, name) > 0:
                raise ValueError(f"tolerance {name} must be positive")
        if not self.root_cluster < self.line_snap:
            raise ValueError("root_cluster must be smaller than line_snap")

    def check_weight(self, m: int) -> None:
        if not self.line_snap < m / 4:
            raise ValueError(f"line_snap={self.line_snap} too large for weight m={m}")


DEFAULT_TOL = Tolerances()


def inertia(M, tol: Tolerances = DEFAULT_TOL) -> tuple[int, int, int]:
    """Return ``(n_minus, n_zero, n_plus)`` for a Hermitian matrix."""
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    if M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"inertia needs a square matrix, got {M.shape}")
    n = M.shape[0]
    if n == 0:
        return (0, 0, 0)
    norm = np.linalg.norm(M, 2)
    if np.linalg.norm(M - M.conj().T, 2) > tol.rank_rel * max(norm, 1e-300) and norm > 0:
        raise NotHermitian("matrix deviates from its adjoint beyond rank_rel")
    w = np.linalg.eigvalsh(0.5 * (M + M.conj().T))
    scale = max(1.0, float(np.max(np.abs(w))))
    cut = tol.zero_eig_abs * scale
    return (int(np.sum(w < -cut)), int(np.sum(np.abs(w) <= cut)), int(np.sum(w > cut)))


def numerical_rank(M, tol: Tolerances = DEFAULT_TOL) -> int:
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol.rank_rel * s[0]))


def nullspace(M, tol: Tolerances = DEFAULT_TOL, scale: Optional[float] = None) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical kernel of ``M``.

    Singular values below ``rank_rel * scale`` count as zero; ``scale``
    defaults to the largest singular value of ``M``.
    """
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    ncols = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(ncols, dtype=complex)
    u, s, vh = np.linalg.svd(M, full_matrices=True)
    ref = s[0] if scale is None and s.size else scale
    if s.size == 0 or not ref:
        return np.eye(ncols, dtype=complex)
    rank = int(np.sum(s > tol.rank_rel * ref))
    return vh[rank:].conj().T.copy()


def orth(M, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the numerical range of ``M``."""
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    if M.size == 0:
        return np.zeros((M.shape[0], 0), dtype=complex)
    u, s, vh = np.linalg.svd(M, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((M.shape[0], 0), dtype=complex)
    rank = int(np.sum(s > tol.rank_rel * s[0]))
    return u[:, :rank].copy()


# -- subspaces -----------------------------------------------------------------

SUBSPACE_TOL = 1e-8


def _basis(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim == 1:
        A = A[:, None]
    return A


def span(A, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    A = _basis(A)
    if A.shape[1] == 0:
        return A.copy()
    return orth(A, tol)


def subspace_contains(A, B, threshold: float = SUBSPACE_TOL) -> bool:
    """True if span(B) is contained in span(A), judged by principal angles."""
    A, B = _basis(A), _basis(B)
    if B.shape[1] == 0:
        return True
    B = span(B)
    if B.shape[1] == 0:
        return True
    if A.shape[1] == 0:
        return False
    A = span(A)
    if B.shape[1] > A.shape[1]:
        return False
    return float(np.max(scipy.linalg.subspace_angles(A, B))) <= threshold


def subspace_equal(A, B, threshold: float = SUBSPACE_TOL) -> bool:
    A, B = span(_basis(A)), span(_basis(B))
    if A.shape[1] != B.shape[1]:
        return False
    if A.shape[1] == 0:
        return True
    return float(np.max(scipy.linalg.subspace_angles(A, B))) <= threshold


def subspace_intersection(A, B, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    A, B = span(_basis(A)), span(_basis(B))
    dim = A.shape[0]
    if A.shape[1] == 0 or B.shape[1] == 0:
        return np.zeros((dim, 0), dtype=complex)
    # x in both  <=>  x = A a = B b
    K = nullspace(np.hstack([A, -B]), Tolerances(rank_rel=max(tol.rank_rel, 1e-8)))
    return span(A @ K[: A.shape[1]])


def subspace_sum(*bases) -> np.ndarray:
    bases = [_basis(b) for b in bases]
    return span(np.hstack(bases))


# -- truncated matrix power series ----------------------------------------------


@dataclass(frozen=True)
class MatrixSeries:
    """Truncated series ``sum_k coeffs[k] s**k`` with square matrix coefficients."""

    coeffs: tuple = field()

    def __init__(self, coeffs: Sequence):
        cs = tuple(np.array(c, dtype=complex, ndmin=2) for c in coeffs)
        if not cs:
            raise DimensionMismatch("a series needs at least one coefficient")
        shape = cs[0].shape
        if shape[0] != shape[1] or any(c.shape != shape for c in cs):
            raise DimensionMismatch("series coefficients must be square and equally sized")
        object.__setattr__(self, "coeffs", cs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def dim(self) -> int:
        return self.coeffs[0].shape[0]

    def __call__(self, s: complex) -> np.ndarray:
        out = np.zeros_like(self.coeffs[0])
        for c in reversed(self.coeffs):
            out = out * s + c
        return out

    def block(self, rows, cols) -> "MatrixSeries":
        """Sub-block series; rows/cols are orthonormal bases of the subspaces."""
        rows = np.asarray(rows, dtype=complex)
        cols = np.asarray(cols, dtype=complex)
        return _RectSeries([rows.conj().T @ c @ cols for c in self.coeffs])

    def truncate(self, order: int) -> "MatrixSeries":
        return MatrixSeries(self.coeffs[: order + 1])

    def shifted(self, nu: int) -> "MatrixSeries":
        """Series divided by ``s**nu`` (the first ``nu`` coefficients are dropped)."""
        return MatrixSeries(self.coeffs[nu:])

    @classmethod
    def identity(cls, n: int, order: int) -> "MatrixSeries":
        return cls([np.eye(n)] + [np.zeros((n, n))] * order)


class _RectSeries(MatrixSeries):
    """Series with rectangular coefficients, used for off-diagonal blocks."""

    def __init__(self, coeffs):
        cs = tuple(np.array(c, dtype=complex, ndmin=2) for c in coeffs)
        object.__setattr__(self, "coeffs", cs)


def series_mul(a: MatrixSeries, b: MatrixSeries) -> MatrixSeries:
    """Truncated Cauchy product; the result has order ``min(a.order, b.order)``."""
    if a.coeffs[0].shape[1] != b.coeffs[0].shape[0]:
        raise DimensionMismatch("inner dimensions of the series do not match")
    N = min(a.order, b.order)
    out = []
    for k in range(N + 1):
        acc = a.coeffs[0] @ b.coeffs[k]
        for i in range(1, k + 1):
            acc = acc + a.coeffs[i] @ b.coeffs[k - i]
        out.append(acc)
    if out[0].shape[0] == out[0].shape[1]:
        return MatrixSeries(out)
    return _RectSeries(out)


def series_inv(a: MatrixSeries, tol: Tolerances = DEFAULT_TOL) -> MatrixSeries:
    """Inverse of a series with invertible constant term, to the same order."""
    a0 = a.coeffs[0]
    if a0.shape[0] != a0.shape[1]:
        raise DimensionMismatch("only square series can be inverted")
    if a0.shape[0] == 0:
        return a
    if np.linalg.cond(a0) * tol.rank_rel >= 1.0:
        raise SingularConstantTerm("constant term is numerically singular")
    inv0 = np.linalg.inv(a0)
    out = [inv0]
    for k in range(1, a.order + 1):
        acc = np.zeros_like(a0)
        for i in range(1, k + 1):
            acc = acc + a.coeffs[i] @ out[k - i]
        out.append(-inv0 @ acc)
    return MatrixSeries(out)


def series_sub(a: MatrixSeries, b: MatrixSeries) -> MatrixSeries:
    N = min(a.order, b.order)
    return MatrixSeries([a.coeffs[k] - b.coeffs[k] for k in range(N + 1)])
