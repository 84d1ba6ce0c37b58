"""Indicial roots: the points where ``p(sigma)`` fails to be invertible."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import ValidationError, WindowTooSmall
from .numerics import DEFAULT_TOL, Tolerances, nullspace
from .pencil import PencilSpec, evaluate, star

INF_RANK_REL = 1e-12
BANDS = ("above", "upper_edge", "strip_upper", "critical", "strip_lower", "lower_edge", "below")


@dataclass(frozen=True)
class Root:
    sigma0: complex
    alg_mult: int
    band: str
    star_partner: Optional[int] = None

    @property
    def in_strip(self) -> bool:
        return self.band in ("strip_upper", "critical", "strip_lower")


def companion(p: PencilSpec):
    """Block companion pair ``(A, B)`` with ``det(A - sigma B) ~ det p(sigma)``."""
    n, mu = p.n, p.mu
    N = n * mu
    A = np.zeros((N, N), dtype=complex)
    B = np.eye(N, dtype=complex)
    for k in range(mu - 1):
        A[k * n : (k + 1) * n, (k + 1) * n : (k + 2) * n] = np.eye(n)
    for j in range(mu):
        A[(mu - 1) * n :, j * n : (j + 1) * n] = -p.coeffs[j]
    B[(mu - 1) * n :, (mu - 1) * n :] = p.coeffs[mu]
    return A, B


def _homogeneous_eigs(p: PencilSpec):
    A, B = companion(p)
    w = scipy.linalg.eig(A, B, right=False, homogeneous_eigvals=True)
    alpha, beta = w[0], w[1]
    norm = np.hypot(np.abs(alpha), np.abs(beta))
    if np.any(norm < 1e-12 * max(np.linalg.norm(A), np.linalg.norm(B))):
        raise ValidationError("pencil is singular (det p vanishes identically)")
    return alpha / norm, beta / norm


def infinite_multiplicity(p: PencilSpec, tol: Tolerances = DEFAULT_TOL) -> int:
    """Algebraic multiplicity of the eigenvalue at infinity.

    Counted as the stable nullity of the block Toeplitz matrices of the
    reversed polynomial ``sum_k a_(mu-k) lam**k`` at ``lam = 0``; the number
    of chains of length at least ``L`` is the increment at step ``L``.
    """
    n, mu = p.n, p.mu
    # the Toeplitz matrices are ill-conditioned in L, so cut at the roundoff floor
    cut = Tolerances(rank_rel=INF_RANK_REL, zero_eig_abs=tol.zero_eig_abs, root_cluster=tol.root_cluster, line_snap=tol.line_snap)
    if np.linalg.svd(p.coeffs[-1], compute_uv=False)[-1] > INF_RANK_REL * p.scale:
        return 0
    rev = [p.coeffs[mu - k] if k <= mu else np.zeros((n, n), dtype=complex) for k in range(n * mu + 1)]
    prev = 0
    for L in range(1, n * mu + 1):
        T = np.zeros((n * L, n * L), dtype=complex)
        for r in range(L):
            for l in range(r, L):
                T[r * n : (r + 1) * n, l * n : (l + 1) * n] = rev[l - r]
        null = nullspace(T, cut, scale=float(np.linalg.norm(T, 2))).shape[1]
        if null == prev:
            break
        prev = null
    return min(prev, n * mu)


def finite_eigenvalues(p: PencilSpec, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Finite eigenvalues of the companion pencil.

    With a singular leading coefficient, roundoff scatters the infinite
    eigenvalues to large but finite values.  Only the ``n mu - k_inf`` most
    finite eigenvalues (largest ``|beta|``) are kept, where ``k_inf`` is the
    multiplicity at infinity from :func:`infinite_multiplicity`.
    """
    if p.mu == 0:
        s = np.linalg.svd(p.coeffs[0], compute_uv=False)
        if s[-1] <= 1e-12 * max(s[0], 1e-300):
            raise ValidationError("constant pencil is singular everywhere")
        return np.zeros(0, dtype=complex)
    alpha, beta = _homogeneous_eigs(p)
    d = p.n * p.mu - infinite_multiplicity(p, tol)
    order = np.argsort(-np.abs(beta), kind="stable")[:d]
    order = order[np.abs(beta[order]) > 1e-14]
    return alpha[order] / beta[order]


def default_window(p: PencilSpec, eigs: Optional[np.ndarray] = None) -> float:
    """``10 (1 + max|a_j| / s_min(a_mu))``, or a bound from the eigenvalues if a_mu is singular."""
    smin = np.linalg.svd(p.coeffs[-1], compute_uv=False)[-1]
    if smin > 1e-10 * p.scale:
        return 10.0 * (1.0 + p.scale / smin)
    if eigs is None:
        eigs = finite_eigenvalues(p)
    return 10.0 * (1.0 + (float(np.max(np.abs(eigs))) if eigs.size else 0.0))


def _cluster(values: np.ndarray, radius: float) -> list[np.ndarray]:
    """Single-linkage clusters of complex points at distance below ``radius``."""
    n = values.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) < radius:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [values[idx] for idx in groups.values()]


def classify_band(sigma: complex, m: int, tol: Tolerances = DEFAULT_TOL) -> tuple[str, complex]:
    """Band of ``sigma`` and the point after snapping onto a nearby line."""
    im = sigma.imag
    for line, band in ((0.0, "upper_edge"), (-m / 2, "critical"), (-float(m), "lower_edge")):
        if abs(im - line) <= tol.line_snap:
            return band, complex(sigma.real, line)
    if im > 0:
        return "above", sigma
    if im > -m / 2:
        return "strip_upper", sigma
    if im > -m:
        return "strip_lower", sigma
    return "below", sigma


def boundary_spectrum(p: PencilSpec, tol: Tolerances = DEFAULT_TOL, window: Optional[float] = None) -> list[Root]:
    """All indicial roots with ``|Re| <= T`` and ``-m-1 <= Im <= 1``, sorted by ``(Im, Re)``."""
    tol.check_weight(p.m)
    eigs = finite_eigenvalues(p, tol)
    T = default_window(p, eigs) if window is None else float(window)
    if T <= 0:
        raise ValueError("window must be positive")
    lo, hi = -p.m - 1.0, 1.0
    clusters = _cluster(eigs, tol.root_cluster)
    found = []
    for c in clusters:
        z = complex(np.mean(c))
        d = min(T - abs(z.real), z.imag - lo, hi - z.imag)
        if abs(d) < tol.root_cluster:
            raise WindowTooSmall(f"root {z:.6g} lies on the window boundary")
        if d > 0:
            found.append((z, c.size))

    snapped: list[list] = []
    for z, k in found:
        band, z = classify_band(z, p.m, tol)
        # snapping can bring two clusters together; merge them
        for r in snapped:
            if r[2] == band and abs(r[0] - z) < tol.root_cluster:
                r[0] = (r[0] * r[1] + z * k) / (r[1] + k)
                r[1] += k
                break
        else:
            snapped.append([z, k, band])
    snapped.sort(key=lambda r: (r[0].imag, r[0].real))

    # pair off star partners and symmetrize their locations
    partner: list[Optional[int]] = [None] * len(snapped)
    for i, (z, k, band) in enumerate(snapped):
        if band == "critical":
            partner[i] = i
            continue
        if partner[i] is not None:
            continue
        target = star(z, p.m)
        best, dist = None, np.inf
        for j, (w, kw, _) in enumerate(snapped):
            if j != i and partner[j] is None and kw == k and abs(w - target) < dist:
                best, dist = j, abs(w - target)
        if best is not None and dist < tol.line_snap:
            partner[i], partner[best] = best, i
            mid = 0.5 * (z + star(snapped[best][0], p.m))
            snapped[i][0] = mid
            snapped[best][0] = star(mid, p.m)
    return [Root(z, k, band, partner[i]) for i, (z, k, band) in enumerate(snapped)]


def check_star_symmetry(roots, m: int, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True if the root multiset is invariant under ``sigma -> sigma*``."""
    used = [False] * len(roots)
    for r in roots:
        target = star(r.sigma0, m)
        hit = False
        for j, s in enumerate(roots):
            if not used[j] and s.alg_mult == r.alg_mult and abs(s.sigma0 - target) <= tol.root_cluster:
                used[j] = hit = True
                break
        if not hit:
            return False
    return True


def minimal_domain_flag(roots) -> bool:
    """False when some root sits on the lower edge ``Im sigma = -m``."""
    return not any(r.band == "lower_edge" for r in roots)


def strip_roots(roots) -> list[Root]:
    return [r for r in roots if r.in_strip]


def edge_roots(roots) -> list[Root]:
    return [r for r in roots if r.band in ("upper_edge", "lower_edge")]


# -- cross-checks -------------------------------------------------------------------


def det_coefficients(p: PencilSpec) -> np.ndarray:
    """Coefficients (lowest first) of the scalar polynomial ``det p`` for ``n <= 2``."""
    P = np.polynomial.polynomial
    if p.n == 1:
        return np.array([c[0, 0] for c in p.coeffs])
    if p.n != 2:
        raise ValueError("det expansion is only used for n <= 2")
    entry = lambda i, j: np.array([c[i, j] for c in p.coeffs])
    return P.polysub(P.polymul(entry(0, 0), entry(1, 1)), P.polymul(entry(0, 1), entry(1, 0)))


def det_roots(p: PencilSpec) -> np.ndarray:
    c = np.polynomial.polynomial.polytrim(det_coefficients(p), 1e-14 * p.scale**p.n)
    if c.size <= 1:
        return np.zeros(0, dtype=complex)
    return np.polynomial.polynomial.polyroots(c)


def winding_number(p: PencilSpec, center: complex, radius: float, npts: int = 4096) -> int:
    """Number of zeros of ``det p`` inside a circle, by the argument principle."""
    t = np.linspace(0.0, 2 * np.pi, npts + 1)
    z = center + radius * np.exp(1j * t)
    phase = np.array([np.angle(np.linalg.slogdet(evaluate(p, s))[0]) for s in z])
    return int(round(np.sum(np.angle(np.exp(1j * np.diff(phase)))) / (2 * np.pi)))
