"""Residue pairing, Gram matrices, sign characteristic and the normal-form reduction.

Convention: ``[u, v]`` is linear in ``u`` and antilinear in ``v``.  For germ
coordinates ``x, y`` in a basis ``e_i`` the quotient Gram matrix ``G`` has
``G[i, j] = [e_j, e_i]`` so that ``[x, y] = y^* G x``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from math import comb
from typing import Optional, Sequence

import numpy as np

from .errors import InvariantMismatch, NotCritical, NotStarPaired, TruncationExhausted
from .germs import GermBasis, PrincipalPart, kernel_space
from .numerics import (
    DEFAULT_TOL,
    MatrixSeries,
    Tolerances,
    inertia,
    series_inv,
    series_mul,
    series_sub,
)
from .pencil import PencilSpec, star, taylor_at


def _is_critical(sigma0: complex, m: int) -> bool:
    return abs(sigma0.imag + m / 2) <= 1e-12 * (1 + abs(sigma0))


def _require_critical(sigma0: complex, m: int):
    if not _is_critical(complex(sigma0), m):
        raise NotCritical(f"{sigma0} is not on the critical line Im = {-m / 2}")


def residue_pairing(p: PencilSpec, u: PrincipalPart, v: PrincipalPart) -> complex:
    """``res_{sigma0} <p(sigma) u(sigma), v(sigma*)>`` for germs at star-paired roots."""
    if abs(v.sigma0 - star(u.sigma0, p.m)) > 1e-9 * (1 + abs(u.sigma0)):
        raise NotStarPaired(f"{v.sigma0} is not the reflection of {u.sigma0}")
    pk = taylor_at(p, u.sigma0, u.L + v.L).coeffs
    total = 0j
    for l in range(1, u.L + 1):
        for j in range(1, v.L + 1):
            k = l + j - 1
            if k <= p.mu:
                total += np.vdot(v.f[j - 1], pk[k] @ u.f[l - 1])
    return complex(total)


def laurent_negative_part(p: PencilSpec, u: PrincipalPart) -> np.ndarray:
    """Coefficients ``c_q`` (row ``-q-1``) of ``s**q``, ``q < 0``, in ``p(sigma) u(sigma)``."""
    pk = taylor_at(p, u.sigma0, u.L).coeffs
    out = np.zeros((u.L, p.n), dtype=complex)
    for q in range(1, u.L + 1):
        for l in range(q, u.L + 1):
            k = l - q
            if k <= p.mu:
                out[q - 1] += pk[k] @ u.f[l - 1]
    return out


def local_pairing(p: PencilSpec, u: PrincipalPart, v: PrincipalPart) -> complex:
    """Residue at ``u.sigma0`` of ``<p u, v(sigma*)>`` for arbitrary root pairs.

    For star-paired roots this equals :func:`residue_pairing`.  Otherwise
    the conjugated germ ``v(sigma*)`` is holomorphic at ``u.sigma0`` and the
    value vanishes exactly for germs in K; numerically it measures how well
    ``p u`` is holomorphic.
    """
    target = star(v.sigma0, p.m)
    if abs(target - u.sigma0) <= 1e-9 * (1 + abs(u.sigma0)):
        return residue_pairing(p, u, v)
    d = u.sigma0 - target
    c = laurent_negative_part(p, u)
    total = 0j
    for j in range(1, v.L + 1):
        for i in range(0, u.L):
            # (s + d)^{-j} = sum_i binom(-j, i) d^{-j-i} s^i pairs with c_{-1-i}
            b = (-1) ** i * comb(j + i - 1, i)
            total += b * d ** (-j - i) * np.vdot(v.f[j - 1], c[i])
    return complex(total)


def gram_matrix(p: PencilSpec, left: Sequence[PrincipalPart], right: Sequence[PrincipalPart]) -> np.ndarray:
    """Entry ``(i, j)`` is ``residue_pairing(left[i], right[j])``."""
    G = np.zeros((len(left), len(right)), dtype=complex)
    for i, u in enumerate(left):
        for j, v in enumerate(right):
            G[i, j] = local_pairing(p, u, v)
    return G


# -- sign characteristic ------------------------------------------------------------


@dataclass(frozen=True)
class CriticalRootInvariants:
    sigma0: complex
    partial_mults: tuple
    m0: tuple  # index l-1
    m_plus: tuple
    m_minus: tuple

    @property
    def ell_max(self) -> int:
        return len(self.m0)

    @property
    def signature_contribution(self) -> int:
        return sum(self.m_plus[l - 1] - self.m_minus[l - 1] for l in range(1, self.ell_max + 1, 2))

    def blocks(self) -> "NormalFormBlocks":
        return NormalFormBlocks(
            tuple(
                (l, self.m_plus[l - 1], self.m_minus[l - 1])
                for l in range(1, self.ell_max + 1)
                if self.m_plus[l - 1] + self.m_minus[l - 1] > 0
            )
        )


@dataclass(frozen=True)
class NormalFormBlocks:
    blocks: tuple  # sorted (ell, n_plus, n_minus), ell ascending

    @property
    def dim(self) -> int:
        return sum(l * (a + b) for l, a, b in self.blocks)

    @property
    def signature_contribution(self) -> int:
        return sum(a - b for l, a, b in self.blocks if l % 2 == 1)

    @classmethod
    def from_signed(cls, items) -> "NormalFormBlocks":
        """Build from an iterable of ``(ell, sign)`` with sign in ``{+1, -1}``."""
        plus, minus = Counter(), Counter()
        for l, s in items:
            (plus if s > 0 else minus)[l] += 1
        ls = sorted(set(plus) | set(minus))
        return cls(tuple((l, plus[l], minus[l]) for l in ls))


def dim_ker_powers(S: np.ndarray, kmax: int) -> list[int]:
    """``dim ker S^k`` for ``k = 0..kmax`` (S is an exact 0/1 Jordan matrix)."""
    n = S.shape[0]
    out, P = [0], np.eye(n)
    for _ in range(kmax):
        P = P @ S
        out.append(n - int(np.linalg.matrix_rank(P)) if n else 0)
    return out


def chain_gram(p: PencilSpec, germ: GermBasis) -> np.ndarray:
    """Quotient Gram ``G[i, j] = [e_j, e_i]`` on a germ basis at a critical root."""
    M = gram_matrix(p, germ.basis, germ.basis)
    return M.T


def ell_invariants(p: PencilSpec, sigma0: complex, germ: GermBasis, tol: Tolerances = DEFAULT_TOL) -> CriticalRootInvariants:
    _require_critical(sigma0, p.m)
    G = chain_gram(p, germ)
    G = 0.5 * (G + G.conj().T)
    S = germ.shift
    dim = germ.dim
    ell_max = max(germ.partial_mults) if germ.partial_mults else 0
    dk = dim_ker_powers(S, ell_max + 1)
    counts = Counter(germ.partial_mults)
    scale = max(1.0, float(np.linalg.norm(G, 2))) if dim else 1.0
    itol = Tolerances(rank_rel=1e-6, zero_eig_abs=tol.zero_eig_abs * 1e2, root_cluster=tol.root_cluster, line_snap=tol.line_snap)
    m0, mp, mm = [], [], []
    Sl = np.eye(dim)
    for l in range(1, ell_max + 1):
        # basis of ker S^l: the first l vectors of each chain
        idx = [c[i] for c in germ.chains() for i in range(min(l, len(c)))]
        K = np.eye(dim)[:, idx]
        H = K.T @ G @ Sl @ K / scale
        H = 0.5 * (H + H.conj().T)
        nm, nz, npl = inertia(H, itol)
        expect0 = dk[l + 1] - dk[l] + dk[l - 1]
        if nz != expect0 or npl + nm != counts.get(l, 0):
            raise InvariantMismatch(
                f"ell={l} at {sigma0}: inertia ({nm},{nz},{npl}) vs m0={expect0}, blocks={counts.get(l, 0)}"
            )
        m0.append(nz)
        mp.append(npl)
        mm.append(nm)
        Sl = Sl @ S
    return CriticalRootInvariants(complex(sigma0), tuple(germ.partial_mults), tuple(m0), tuple(mp), tuple(mm))


# -- normal form --------------------------------------------------------------------


def _hermitian_series(q: MatrixSeries) -> MatrixSeries:
    return MatrixSeries([0.5 * (c + c.conj().T) for c in q.coeffs])


def _reduce(q: MatrixSeries, offset: int, thr: float, out: list):
    d = q.dim
    if d == 0:
        return
    nu = next((k for k, c in enumerate(q.coeffs) if np.linalg.norm(c, 2) > thr), None)
    if nu is None:
        raise TruncationExhausted("series vanishes to the truncation order")
    qt = q.shifted(nu)
    w, V = np.linalg.eigh(qt.coeffs[0])
    zero = np.abs(w) <= thr
    W, Z = V[:, ~zero], V[:, zero]
    if W.shape[1]:
        wz = w[~zero]
        out.append((offset + nu, int(np.sum(wz > 0)), int(np.sum(wz < 0))))
    if Z.shape[1] == 0:
        return
    if qt.order == 0:
        raise TruncationExhausted("no series terms left for the singular part")
    q11, q12 = qt.block(Z, Z), qt.block(Z, W)
    q21, q22 = qt.block(W, Z), qt.block(W, W)
    if W.shape[1]:
        c = series_sub(MatrixSeries(q11.coeffs), series_mul(series_mul(q12, series_inv(MatrixSeries(q22.coeffs))), q21))
    else:
        c = MatrixSeries(q11.coeffs)
    c = _hermitian_series(c)
    # constant term vanishes by construction
    c = MatrixSeries([np.zeros_like(c.coeffs[0])] + list(c.coeffs[1:]))
    _reduce(c, offset + nu, thr, out)


def normal_form(
    p: PencilSpec,
    sigma0: complex,
    tol: Tolerances = DEFAULT_TOL,
    alg_mult: Optional[int] = None,
) -> NormalFormBlocks:
    """Block sizes and signs of the local normal form ``diag(+-s**l)`` at a critical root."""
    _require_critical(sigma0, p.m)
    if alg_mult is None:
        alg_mult = p.n * p.mu
    N = alg_mult + p.mu
    thr = 1e-7 * max(1.0, p.scale)
    for attempt in range(2):
        q = _hermitian_series(taylor_at(p, sigma0, N))
        out: list = []
        try:
            _reduce(q, 0, thr, out)
            break
        except TruncationExhausted:
            if attempt == 1:
                raise
            N *= 2
    nf = NormalFormBlocks.from_signed(
        [(l, +1) for l, a, b in out if l >= 1 for _ in range(a)]
        + [(l, -1) for l, a, b in out if l >= 1 for _ in range(b)]
    )
    return nf


def total_signature(invariants) -> int:
    return sum(inv.signature_contribution for inv in invariants)


@dataclass(frozen=True)
class CriticalAnalysis:
    invariants: CriticalRootInvariants
    normal_form: NormalFormBlocks
    germ: GermBasis
    gram: np.ndarray = field(repr=False)


def analyze_critical_root(p: PencilSpec, sigma0: complex, alg_mult: int, tol: Tolerances = DEFAULT_TOL) -> CriticalAnalysis:
    """ell-form invariants and normal form at a critical root, cross-checked."""
    germ = kernel_space(p, sigma0, alg_mult=alg_mult, tol=tol)
    inv = ell_invariants(p, sigma0, germ, tol)
    nf = normal_form(p, sigma0, tol, alg_mult=alg_mult)
    if nf.blocks != inv.blocks().blocks:
        raise InvariantMismatch(f"normal form {nf.blocks} disagrees with ell-forms {inv.blocks().blocks}")
    return CriticalAnalysis(inv, nf, germ, chain_gram(p, germ))
