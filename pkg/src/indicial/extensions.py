"""The quotient ``E_max`` with its Gram form and generator, and its distinguished subspaces.

Coordinates on ``E_max`` are germ-basis coordinates: the blocks of the open
strip roots (sorted by ``(Im, Re)``) are concatenated, each in the chain basis
produced by :func:`germs.kernel_space`.  All classifications below are
invariant under a change of basis, so this choice is harmless.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from .errors import (
    CanonicalFormFailure,
    GramDegenerate,
    InvariantMismatch,
    NoInvariantSelfadjointExtension,
    NotCritical,
    NotSemibounded,
    PreconditionViolated,
    SignConditionViolated,
)
from .forms import CriticalAnalysis, analyze_critical_root, local_pairing
from .germs import GermBasis, PrincipalPart, kernel_space, log_coeffs_from_germ
from .numerics import (
    DEFAULT_TOL,
    SUBSPACE_TOL,
    Tolerances,
    inertia,
    nullspace,
    span,
    subspace_contains,
    subspace_equal,
    subspace_intersection,
)
from .pencil import PencilSpec, evaluate
from .roots import Root, boundary_spectrum, edge_roots, strip_roots

GRAM_TOL = 1e-9
SIP_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class ExtensionSubspace:
    """Columns span a subspace of ``E_max`` in germ coordinates."""

    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def of(cls, A, total: int) -> "ExtensionSubspace":
        A = np.asarray(A, dtype=complex)
        if A.size == 0:
            return cls(np.zeros((total, 0), dtype=complex))
        return cls(span(A.reshape(total, -1)))


@dataclass(frozen=True, eq=False)
class JordanBlock:
    size: int
    sign: int
    vectors: np.ndarray  # global coordinates; column i is the chain vector u_{i+1}


class QuotientModel:
    """``E_max`` as a graded space with Gram matrix ``G[i, j] = [e_j, e_i]`` and generator."""

    def __init__(self, p: PencilSpec, roots: list, germs: list, tol: Tolerances):
        self.p = p
        self.tol = tol
        self.all_roots = roots
        self.roots = strip_roots(roots)
        self.germs = germs
        self.offsets = np.cumsum([0] + [g.dim for g in germs]).tolist()
        self.dim = self.offsets[-1]
        self.warnings = [
            f"root {r.sigma0:.6g} on the {r.band.replace('_', ' ')} is excluded from the quotient"
            for r in edge_roots(roots)
        ]
        N = self.dim
        self.generator = np.zeros((N, N), dtype=complex)
        for k, g in enumerate(germs):
            sl = self.block_slice(k)
            self.generator[sl, sl] = self.roots[k].sigma0 * np.eye(g.dim) + g.shift
        raw = np.zeros((N, N), dtype=complex)
        basis = self.basis
        for i in range(N):
            for j in range(N):
                raw[i, j] = local_pairing(p, basis[j], basis[i])
        self.raw_gram = raw
        self.gram = self._paired_part(raw)
        self.cross_residual = float(np.max(np.abs(raw - self.gram))) if N else 0.0

    # -- structure ----------------------------------------------------------

    def block_slice(self, k: int) -> slice:
        return slice(self.offsets[k], self.offsets[k + 1])

    @property
    def basis(self) -> list:
        return [b for g in self.germs for b in g.basis]

    def _paired_part(self, M):
        out = np.zeros_like(M)
        for a, ra in enumerate(self.roots):
            for b, rb in enumerate(self.roots):
                if self._paired(ra, rb):
                    out[self.block_slice(a), self.block_slice(b)] = M[self.block_slice(a), self.block_slice(b)]
        return out

    def _paired(self, ra: Root, rb: Root) -> bool:
        return abs(rb.sigma0 - (ra.sigma0.conjugate() - 1j * self.p.m)) <= 1e-9 * (1 + abs(ra.sigma0))

    def root_index(self, sigma0: complex) -> int:
        for k, r in enumerate(self.roots):
            if abs(r.sigma0 - sigma0) <= self.tol.root_cluster:
                return k
        raise KeyError(f"no strip root at {sigma0}")

    def block_basis(self, indices) -> np.ndarray:
        cols = [np.eye(self.dim)[:, self.block_slice(k)] for k in indices]
        if not cols:
            return np.zeros((self.dim, 0), dtype=complex)
        return np.hstack(cols).astype(complex)

    @property
    def critical_indices(self) -> list[int]:
        return [k for k, r in enumerate(self.roots) if r.band == "critical"]

    @property
    def lower_indices(self) -> list[int]:
        return [k for k, r in enumerate(self.roots) if r.band == "strip_lower"]

    @property
    def upper_indices(self) -> list[int]:
        return [k for k, r in enumerate(self.roots) if r.band == "strip_upper"]

    def e_minus(self) -> np.ndarray:
        """Direct sum of the germ spaces below the critical line."""
        return self.block_basis(self.lower_indices)

    def e_plus(self) -> np.ndarray:
        return self.block_basis(self.upper_indices)

    @cached_property
    def critical(self) -> dict:
        """Cross-checked invariants at each critical root, keyed by block index."""
        out = {}
        for k in self.critical_indices:
            r = self.roots[k]
            out[k] = analyze_critical_root(self.p, r.sigma0, r.alg_mult, self.tol)
        return out

    # -- checks -------------------------------------------------------------

    def verify(self) -> None:
        G, N = self.gram, self.dim
        if N == 0:
            return
        gnorm = float(np.linalg.norm(G, 2))
        if self.cross_residual > GRAM_TOL * max(gnorm, 1.0):
            raise InvariantMismatch(f"cross Gram blocks of size {self.cross_residual:.3g} do not vanish")
        if float(np.linalg.norm(G - G.conj().T, 2)) > GRAM_TOL * gnorm:
            raise InvariantMismatch("quotient Gram matrix is not Hermitian")
        smin = float(np.linalg.svd(G, compute_uv=False)[-1])
        if smin <= self.tol.zero_eig_abs * max(gnorm, 1.0):
            raise GramDegenerate(f"smallest singular value of the Gram matrix is {smin:.3g}")
        h = self.generator + 0.5j * self.p.m * np.eye(N)
        defect = float(np.linalg.norm(G @ h - h.conj().T @ G, 2))
        if defect > GRAM_TOL * gnorm * max(float(np.linalg.norm(self.generator, 2)), 1.0):
            raise InvariantMismatch(f"generator is not Gram-selfadjoint (defect {defect:.3g})")
        ims = np.linalg.eigvals(self.generator).imag
        if np.any(ims >= 0) or np.any(ims <= -self.p.m):
            raise InvariantMismatch("generator has eigenvalues outside the open strip")

    # -- convenience --------------------------------------------------------

    def subspace(self, A) -> ExtensionSubspace:
        return ExtensionSubspace.of(A, self.dim)

    def principal_parts(self, x) -> list[PrincipalPart]:
        """Split a coordinate vector into principal parts, one per root with nonzero component."""
        x = np.asarray(x, dtype=complex).reshape(-1)
        out = []
        for k, g in enumerate(self.germs):
            c = x[self.block_slice(k)]
            if np.linalg.norm(c) <= SUBSPACE_TOL * max(np.linalg.norm(x), 1e-300):
                continue
            f = sum(ci * b.f for ci, b in zip(c, g.basis))
            out.append(PrincipalPart(g.sigma0, f))
        return out


def build_quotient(p: PencilSpec, tol: Tolerances = DEFAULT_TOL, window: Optional[float] = None, roots=None) -> QuotientModel:
    p.validated(tol)
    if roots is None:
        roots = boundary_spectrum(p, tol, window)
    germs = [kernel_space(p, r.sigma0, alg_mult=r.alg_mult, tol=tol) for r in strip_roots(roots)]
    Q = QuotientModel(p, roots, germs, tol)
    Q.verify()
    return Q


# -- subspace relations ---------------------------------------------------------------


def _as_basis(Q: QuotientModel, D) -> np.ndarray:
    if isinstance(D, ExtensionSubspace):
        return D.basis
    A = np.asarray(D, dtype=complex)
    return A.reshape(Q.dim, -1) if A.size else np.zeros((Q.dim, 0), dtype=complex)


def adjoint_subspace(Q: QuotientModel, D) -> ExtensionSubspace:
    """``D^[perp] = {v : [d, v] = 0 for all d in D}``."""
    B = _as_basis(Q, D)
    if B.shape[1] == 0:
        return Q.subspace(np.eye(Q.dim))
    return Q.subspace(nullspace(B.conj().T @ Q.gram))


def is_selfadjoint(Q: QuotientModel, D) -> bool:
    B = span(_as_basis(Q, D))
    if 2 * B.shape[1] != Q.dim:
        return False
    if Q.dim == 0:
        return True
    return subspace_equal(B, adjoint_subspace(Q, B).basis)


def is_invariant(Q: QuotientModel, D) -> bool:
    B = span(_as_basis(Q, D))
    return subspace_contains(B, Q.generator @ B)


def deficiency_indices(Q: QuotientModel) -> tuple[int, int]:
    if Q.dim == 0:
        return (0, 0)
    G = Q.gram / max(1.0, float(np.linalg.norm(Q.gram, 2)))
    nm, nz, npl = inertia(G, Q.tol)
    if nz:
        raise GramDegenerate("quotient Gram matrix has a kernel")
    return (npl, nm)


# -- canonical form at critical roots ---------------------------------------------------


def _nilpotency(S: np.ndarray, B: np.ndarray) -> int:
    ell, X = 0, B
    scale = max(float(np.linalg.norm(B)), 1e-300)
    while np.linalg.norm(X) > 1e-10 * scale:
        X = S @ X
        ell += 1
    return ell


def canonical_chain_basis(Q: QuotientModel, sigma0: complex, seed: Optional[int] = None) -> list[JordanBlock]:
    """Gram-orthogonal Jordan chains at a critical root with exact +-SIP Gram matrices.

    Chains of the largest remaining length are split off one level at a
    time: tops diagonalize the ell-form, a triangular correction makes the
    chain Gram exactly the signed flip matrix, and the rest of the space is
    replaced by its Gram-orthogonal complement.
    """
    k = Q.root_index(sigma0)
    if Q.roots[k].band != "critical":
        raise NotCritical(f"{sigma0} is not a critical root")
    sl = Q.block_slice(k)
    G = Q.gram[sl, sl]
    G = 0.5 * (G + G.conj().T)
    S = Q.germs[k].shift
    d = S.shape[0]
    if seed is None:
        W = np.eye(d, dtype=complex)
    else:
        rng = np.random.default_rng(seed)
        W = np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))[0]
    blocks_local = []
    while W.shape[1]:
        ell = _nilpotency(S, W)
        Sl1 = np.linalg.matrix_power(S, ell - 1)
        H = W.conj().T @ G @ Sl1 @ W
        H = 0.5 * (H + H.conj().T)
        lam, V = np.linalg.eigh(H)
        keep = np.abs(lam) > 1e-8 * max(float(np.max(np.abs(lam))), 1e-300)
        if not np.any(keep):
            raise CanonicalFormFailure("ell-form vanishes on the remaining space")
        lam, V = lam[keep], V[:, keep]
        X = W @ V / np.sqrt(np.abs(lam))
        E = np.diag(np.sign(lam))
        # F(t) = sum_e F^(e) t^e with F^(e) = X^* G S^(ell-1-e) X
        F = [X.conj().T @ G @ np.linalg.matrix_power(S, ell - 1 - e) @ X for e in range(ell)]
        A = [np.eye(X.shape[1], dtype=complex)]
        for q in range(1, ell):
            K = np.zeros_like(A[0])
            # every term except the two that contain the unknown A_q
            for a in range(q):
                for b in range(q - a + 1):
                    if b < q:
                        K = K + A[a].conj().T @ F[q - a - b] @ A[b]
            K = 0.5 * (K + K.conj().T)
            A.append(-0.5 * E @ K)
        Xp = sum(np.linalg.matrix_power(S, j) @ X @ A[j] for j in range(ell))
        chain_vectors = []
        for c in range(Xp.shape[1]):
            U = np.column_stack([np.linalg.matrix_power(S, ell - i) @ Xp[:, c] for i in range(1, ell + 1)])
            sign = int(E[c, c])
            blocks_local.append((ell, sign, U))
            chain_vectors.append(U)
        Uall = np.hstack(chain_vectors)
        W = W @ nullspace(Uall.conj().T @ G @ W, Tolerances(rank_rel=1e-8))
        if W.shape[1]:
            W = np.linalg.qr(W)[0]
    # verification
    allU = np.hstack([U for _, _, U in blocks_local])
    target = np.zeros((allU.shape[1], allU.shape[1]))
    off = 0
    for ell, sign, U in blocks_local:
        target[off : off + ell, off : off + ell] = sign * np.fliplr(np.eye(ell))
        off += ell
    gram = allU.conj().T @ G @ allU
    if allU.shape[1] != d or np.max(np.abs(gram - target)) > SIP_TOL:
        raise CanonicalFormFailure(f"chain Gram deviates from the signed flip form at {sigma0} by {np.max(np.abs(gram - target)):.2e}")
    out = []
    for ell, sign, U in sorted(blocks_local, key=lambda b: (-b[0], -b[1])):
        V = np.zeros((Q.dim, ell), dtype=complex)
        V[sl] = U
        out.append(JordanBlock(ell, sign, V))
    return out


# -- sign condition and distinguished extensions ------------------------------------------


def sign_condition(Q: QuotientModel) -> bool:
    for ana in Q.critical.values():
        for l, npl, nm in ana.normal_form.blocks:
            if l % 2 == 1 and npl + nm > 0:
                return False
            if l % 2 == 0 and npl > 0 and nm > 0:
                return False
    return True


def critical_half_space(Q: QuotientModel, seed: Optional[int] = None) -> np.ndarray:
    """Sum over critical roots of the lower halves of the (even) Jordan chains."""
    cols = []
    for k in Q.critical_indices:
        for blk in canonical_chain_basis(Q, Q.roots[k].sigma0, seed):
            if blk.size % 2:
                raise SignConditionViolated("odd Jordan block at a critical root")
            cols.append(blk.vectors[:, : blk.size // 2])
    if not cols:
        return np.zeros((Q.dim, 0), dtype=complex)
    return np.hstack(cols)


def semibounded_check(p: PencilSpec, tol: Tolerances = DEFAULT_TOL, samples: int = 201, roots=None, Q: Optional[QuotientModel] = None) -> bool:
    """Sampled positivity of ``p`` on the critical line plus positive even normal forms at critical roots."""
    if roots is None:
        roots = Q.all_roots if Q is not None else boundary_spectrum(p, tol)
    reach = max([abs(r.sigma0.real) for r in roots] + [1.0])
    R = 2.0 * reach
    ts = np.concatenate([np.linspace(-R, R, samples), [r.sigma0.real for r in roots if r.band == "critical"]])
    floor = -tol.zero_eig_abs * max(1.0, p.scale)
    for t in ts:
        A = evaluate(p, complex(t, -p.m / 2))
        if np.linalg.eigvalsh(0.5 * (A + A.conj().T))[0] < floor:
            return False
    if Q is not None:
        analyses = Q.critical.values()
    else:
        analyses = [analyze_critical_root(p, r.sigma0, r.alg_mult, tol) for r in roots if r.band == "critical"]
    for ana in analyses:
        for l, npl, nm in ana.normal_form.blocks:
            if nm or l % 2:
                return False
    return True


def _require_semibounded(Q: QuotientModel):
    if not sign_condition(Q):
        raise SignConditionViolated("sign condition fails at a critical root")
    if not semibounded_check(Q.p, Q.tol, Q=Q):
        raise NotSemibounded("indicial family is not nonnegative on the critical line")


def _verify_extension(Q: QuotientModel, D: ExtensionSubspace, what: str) -> ExtensionSubspace:
    if not is_selfadjoint(Q, D):
        raise CanonicalFormFailure(f"{what} is not Lagrangian")
    if not is_invariant(Q, D):
        raise CanonicalFormFailure(f"{what} is not invariant under the generator")
    return D


def friedrichs_subspace(Q: QuotientModel) -> ExtensionSubspace:
    _require_semibounded(Q)
    D = Q.subspace(np.hstack([Q.e_minus(), critical_half_space(Q)]))
    return _verify_extension(Q, D, "Friedrichs subspace")


def krein_subspace(Q: QuotientModel) -> ExtensionSubspace:
    _require_semibounded(Q)
    half = critical_half_space(Q)
    K = Q.subspace(np.hstack([Q.e_plus(), half]))
    _verify_extension(Q, K, "Krein subspace")
    F = friedrichs_subspace(Q)
    inter = subspace_intersection(F.basis, K.basis)
    if not subspace_equal(inter, half):
        raise InvariantMismatch("Friedrichs and Krein subspaces do not meet in the critical half-space")
    crit = Q.block_basis(Q.critical_indices)
    if not subspace_equal(np.hstack([F.basis, K.basis, crit]), np.eye(Q.dim)):
        raise InvariantMismatch("Friedrichs, Krein and critical germ spaces do not span the quotient")
    return K


def construct_invariant_selfadjoint(Q: QuotientModel, seed: Optional[int] = None) -> ExtensionSubspace:
    """Invariant Lagrangian subspace: lower half-chains, paired odd middles, and all of E_minus."""
    cols = [Q.e_minus()]
    for k in Q.critical_indices:
        blocks = canonical_chain_basis(Q, Q.roots[k].sigma0, seed)
        plus = [b for b in blocks if b.size % 2 and b.sign > 0]
        minus = [b for b in blocks if b.size % 2 and b.sign < 0]
        if len(plus) != len(minus):
            raise NoInvariantSelfadjointExtension(
                f"odd blocks at {Q.roots[k].sigma0} have signature {len(plus) - len(minus)}"
            )
        for b in blocks:
            cols.append(b.vectors[:, : b.size // 2])
        for v, w in zip(plus, minus):
            cols.append((v.vectors[:, v.size // 2] + w.vectors[:, w.size // 2])[:, None])
    D = Q.subspace(np.hstack(cols))
    return _verify_extension(Q, D, "invariant extension")


def extension_from_invariant(Q: QuotientModel, U, seed: Optional[int] = None) -> ExtensionSubspace:
    """Invariant selfadjoint extension whose part below the critical line is ``U``.

    ``U`` must be a generator-invariant subspace of E_minus.  The result is
    ``(E_plus cap U^[perp]) + U + critical half-space``.
    """
    U = _as_basis(Q, U)
    if not subspace_contains(Q.e_minus(), U) or not is_invariant(Q, U):
        raise PreconditionViolated("U must be an invariant subspace of E_minus")
    Up = adjoint_subspace(Q, U).basis
    top = subspace_intersection(Q.e_plus(), Up)
    D = Q.subspace(np.hstack([top, U, critical_half_space(Q, seed)]))
    return _verify_extension(Q, D, "invariant extension")


def order_leq(Q: QuotientModel, D1, D2) -> bool:
    """``D1 <= D2`` in the order of invariant selfadjoint extensions of a semibounded operator."""
    if not sign_condition(Q) or not semibounded_check(Q.p, Q.tol, Q=Q):
        raise PreconditionViolated("order relation needs the sign condition and a nonnegative family")
    for D in (D1, D2):
        if not (is_selfadjoint(Q, D) and is_invariant(Q, D)):
            raise PreconditionViolated("order relation is defined for invariant selfadjoint extensions")
    Em = Q.e_minus()
    a = subspace_intersection(_as_basis(Q, D1), Em)
    b = subspace_intersection(_as_basis(Q, D2), Em)
    return subspace_contains(b, a)


def boundary_expansion(Q: QuotientModel, D) -> list:
    """Log-coefficient expansions of an orthonormal basis of ``D``.

    Each entry lists ``(sigma0, e)`` pairs where ``e[j]`` multiplies
    ``log(x)**j x**(i sigma0)``.
    """
    out = []
    for x in span(_as_basis(Q, D)).T:
        terms = []
        for f in Q.principal_parts(x):
            lc = log_coeffs_from_germ(f)
            k = max((j for j in range(lc.e.shape[0]) if np.linalg.norm(lc.e[j]) > SUBSPACE_TOL), default=0)
            terms.append((lc.sigma0, lc.e[: k + 1]))
        out.append(terms)
    return out
