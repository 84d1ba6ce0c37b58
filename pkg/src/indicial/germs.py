"""Principal parts of meromorphic germs annihilated by the pencil.

At a root ``sigma0`` the space K consists of tuples ``(f_1, ..., f_L)`` (the
coefficient of ``(sigma - sigma0)**-l`` is ``f_l``) such that
``p(sigma) * sum_l f_l (sigma - sigma0)**-l`` is holomorphic.  Multiplication
by ``sigma - sigma0`` acts on K as the nilpotent shift
``(f_1, ..., f_L) -> (f_2, ..., f_L, 0)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Optional

import numpy as np

from .errors import DimensionMismatch
from .numerics import DEFAULT_TOL, SUBSPACE_TOL, Tolerances, nullspace
from .pencil import PencilSpec, taylor_at


@dataclass(frozen=True, eq=False)
class PrincipalPart:
    sigma0: complex
    f: np.ndarray  # shape (L, n); row l-1 holds f_l

    @property
    def L(self) -> int:
        return self.f.shape[0]

    def padded(self, L: int) -> np.ndarray:
        if L < self.L:
            if np.any(self.f[L:]):
                raise DimensionMismatch("cannot truncate a nonzero principal part")
            return self.f[:L]
        out = np.zeros((L, self.f.shape[1]), dtype=complex)
        out[: self.L] = self.f
        return out

    def pole_order(self, atol: float = 0.0) -> int:
        nz = [l for l in range(self.L) if np.linalg.norm(self.f[l]) > atol]
        return nz[-1] + 1 if nz else 0


@dataclass(frozen=True, eq=False)
class LogCoefficients:
    """The function ``omega(x) * sum_j e_j log(x)**j * x**(i sigma0)``."""

    sigma0: complex
    e: np.ndarray  # shape (k+1, n)


@dataclass(frozen=True, eq=False)
class GermBasis:
    sigma0: complex
    basis: tuple  # of PrincipalPart
    shift: np.ndarray
    partial_mults: tuple
    L: int

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def matrix(self) -> np.ndarray:
        """Columns are the stacked vectors ``(f_1; ...; f_L)`` of the basis."""
        if not self.basis:
            return np.zeros((0, 0), dtype=complex)
        return np.column_stack([b.f.reshape(-1) for b in self.basis])

    def chains(self) -> list[list[int]]:
        """Index lists of the Jordan chains, each ordered eigenvector first."""
        out, start = [], 0
        for k in self.partial_mults:
            out.append(list(range(start, start + k)))
            start += k
        return out


def toeplitz_conditions(p: PencilSpec, sigma0: complex, L: int) -> np.ndarray:
    """Block upper-triangular Toeplitz matrix whose kernel is K truncated at pole order L."""
    n = p.n
    pk = taylor_at(p, sigma0, max(L - 1, 0)).coeffs
    T = np.zeros((n * L, n * L), dtype=complex)
    for r in range(L):
        for l in range(r, L):
            T[r * n : (r + 1) * n, l * n : (l + 1) * n] = pk[l - r]
    return T


def kernel_space(
    p: PencilSpec,
    sigma0: complex,
    L_max: Optional[int] = None,
    tol: Tolerances = DEFAULT_TOL,
    alg_mult: Optional[int] = None,
) -> GermBasis:
    """Chain basis of K at ``sigma0``.

    The basis is built level by level: ``V_k`` is the span of the leading
    vectors ``f_k`` of solutions with pole order at most ``k``; chain tops of
    length exactly ``k`` are lifted from a complement of ``V_{k+1}`` in
    ``V_k``.  Each chain is stored as ``[S^{k-1} top, ..., S top, top]`` so
    the shift matrix is an exact Jordan matrix with ones above the diagonal.
    """
    n = p.n
    L = L_max if L_max is not None else alg_mult
    if L is None:
        raise ValueError("either L_max or alg_mult is required")
    if alg_mult is not None and L < alg_mult:
        raise ValueError("L_max must be at least alg_mult")

    kernels = [np.zeros((0, 0), dtype=complex)]
    leading = [np.zeros((n, 0), dtype=complex)]
    for k in range(1, L + 1):
        N = nullspace(toeplitz_conditions(p, sigma0, k), tol, scale=p.scale)
        kernels.append(N)
        lead = N[(k - 1) * n :, :]
        u, s, _ = np.linalg.svd(lead, full_matrices=False)
        r = N.shape[1] - kernels[k - 1].shape[1]
        if r < 0:
            raise DimensionMismatch("kernel dimensions are not monotone in the pole order")
        leading.append(u[:, :r])
    leading.append(np.zeros((n, 0), dtype=complex))

    chains = []
    for k in range(L, 0, -1):
        Vk, Vnext = leading[k], leading[k + 1]
        r = Vk.shape[1] - Vnext.shape[1]
        if r < 0:
            raise DimensionMismatch("leading-vector spaces are not nested")
        if r == 0:
            continue
        proj = Vk - Vnext @ (Vnext.conj().T @ Vk)
        u, s, _ = np.linalg.svd(proj, full_matrices=False)
        W = u[:, :r]
        N = kernels[k]
        lead = N[(k - 1) * n :, :]
        coef, *_ = np.linalg.lstsq(lead, W, rcond=None)
        tops = N @ coef  # columns in C^{nk}
        for c in range(r):
            top = np.zeros((L, n), dtype=complex)
            top[:k] = tops[:, c].reshape(k, n)
            chain = [np.vstack([top[i:], np.zeros((i, n), dtype=complex)]) for i in range(k - 1, -1, -1)]
            chains.append(chain)

    basis, mults = [], []
    for chain in chains:
        mults.append(len(chain))
        basis.extend(PrincipalPart(complex(sigma0), f) for f in chain)
    dim = len(basis)
    S = np.zeros((dim, dim), dtype=complex)
    start = 0
    for k in mults:
        for i in range(1, k):
            S[start + i - 1, start + i] = 1.0
        start += k
    if alg_mult is not None and dim != alg_mult:
        raise DimensionMismatch(f"germ space at {sigma0} has dimension {dim}, expected {alg_mult}")
    return GermBasis(complex(sigma0), tuple(basis), S, tuple(mults), L)


def apply_shift(f: PrincipalPart) -> PrincipalPart:
    g = np.zeros_like(f.f)
    g[:-1] = f.f[1:]
    return PrincipalPart(f.sigma0, g)


def _dictionary_factor(j: int) -> complex:
    return (-1) ** j * factorial(j) * 1j ** (j + 1)


def germ_from_log_coeffs(u: LogCoefficients) -> PrincipalPart:
    e = np.atleast_2d(np.asarray(u.e, dtype=complex))
    f = np.array([_dictionary_factor(j) * e[j] for j in range(e.shape[0])])
    return PrincipalPart(complex(u.sigma0), f)


def log_coeffs_from_germ(f: PrincipalPart) -> LogCoefficients:
    e = np.array([f.f[j] / _dictionary_factor(j) for j in range(f.L)])
    return LogCoefficients(f.sigma0, e)


def membership(p: PencilSpec, sigma0: complex, u: LogCoefficients, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True if the log-polynomial ``u`` has a principal part lying in K."""
    f = germ_from_log_coeffs(u)
    norm = np.linalg.norm(f.f)
    if norm == 0:
        return True
    N = nullspace(toeplitz_conditions(p, sigma0, f.L), tol, scale=p.scale)
    x = f.f.reshape(-1)
    resid = x - N @ (N.conj().T @ x)
    return float(np.linalg.norm(resid)) <= SUBSPACE_TOL * norm
