"""Randomized symmetric pencils with known local structure.

Work in the coordinate ``tau = sigma + i m/2`` where symmetry of ``p`` means
that ``q(tau) = p(tau - i m/2)`` has Hermitian coefficients and critical
roots are real.  Members are built as congruences ``U^star D U`` of a
diagonal ``D`` whose entries plant Jordan blocks of prescribed size and sign;
``U(tau) = C (I + tau N)`` with ``N`` strictly upper triangular has constant
determinant, so no roots are added.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .forms import NormalFormBlocks
from .pencil import PencilSpec, poly_mul, trim

MAX_DEGREE = 4


@dataclass
class CorpusMember:
    pencil: PencilSpec
    planted: dict = field(default_factory=dict)  # sigma0 -> NormalFormBlocks at critical roots
    label: str = ""


def _poly_from_roots(roots) -> np.ndarray:
    c = np.array([1.0 + 0j])
    for z in roots:
        c = np.polynomial.polynomial.polymul(c, [-z, 1.0])
    return c


def random_unimodular(rng: np.random.Generator, n: int, degree: int, max_cond: float = 20.0) -> list:
    """``C (I + tau N)`` with well-conditioned ``C``; constant when ``degree == 0``."""
    while True:
        C = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
        if np.linalg.cond(C) < max_cond:
            break
    if degree == 0 or n == 1:
        return [C]
    N = np.triu(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)), 1) * 0.5
    return [C, C @ N]


def tau_star(coeffs) -> list:
    """``U^star(tau) = U(conj tau)^*`` in tau coordinates: conjugate-transpose each coefficient."""
    return [np.asarray(c).conj().T for c in coeffs]


def congruence_tau(D: list, U: list) -> list:
    return trim(poly_mul(poly_mul(tau_star(U), D), U))


def _diag_poly(entries, n) -> list:
    deg = max(len(e) for e in entries) - 1
    out = [np.zeros((n, n), dtype=complex) for _ in range(deg + 1)]
    for i, e in enumerate(entries):
        for k, c in enumerate(e):
            out[k][i, i] = c
    return out


def _pick_critical_points(rng, count, spread=2.0, gap=0.3):
    pts = []
    while len(pts) < count:
        t = float(np.round(rng.uniform(-spread, spread), 3))
        if all(abs(t - s) >= gap for s in pts):
            pts.append(t)
    return pts


def _pick_offline_point(rng, m, spread=2.0):
    """Non-real ``z`` (tau coordinates) away from the lines ``Im tau in {0, +-m/2}``."""
    half = m / 2
    while True:
        y = rng.uniform(0.15, half + 0.8)
        if abs(y - half) > 0.15:
            return complex(np.round(rng.uniform(-spread, spread), 3), np.round(y, 3))


def critical_member(rng: np.random.Generator, n_max: int = 6) -> CorpusMember:
    """Pencil with planted critical roots of known block sizes and signs."""
    m = int(rng.integers(1, 4))
    n = int(rng.integers(1, n_max + 1))
    deg_u = int(rng.integers(0, 2)) if n > 1 else 0
    budget = MAX_DEGREE - 2 * deg_u
    n_crit = int(rng.integers(1, 3))
    ts = _pick_critical_points(rng, n_crit)
    entries, signs, exps = [], [], []
    for i in range(n):
        eps = 1 if rng.random() < 0.5 else -1
        left = int(rng.integers(1 if i == 0 else 0, budget + 1))
        e = [0] * n_crit
        roots, quad = [], []
        while left > 0:
            choice = rng.random()
            if choice < 0.75 or left < 2:
                r = int(rng.integers(0, n_crit))
                e[r] += 1
                roots.append(ts[r])
                left -= 1
            else:
                z = _pick_offline_point(rng, m)
                quad.append(z)
                roots.extend([z, z.conjugate()])
                left -= 2
            if rng.random() < 0.3:
                break
        c = eps * _poly_from_roots(roots)
        entries.append(c.real.astype(complex) if np.allclose(c.imag, 0) else c)
        signs.append(eps)
        exps.append((e, quad))
    if all(sum(e) == 0 for e, _ in exps):
        # guarantee at least one critical root
        entries[0] = np.polynomial.polynomial.polymul(entries[0], [-ts[0], 1.0])
        exps[0][0][0] += 1
    # drop planted points that ended up unused
    D = _diag_poly(entries, n)
    if len(D) - 1 + 2 * deg_u > MAX_DEGREE:
        deg_u = 0
    U = random_unimodular(rng, n, deg_u)
    q = congruence_tau(D, U)
    p = PencilSpec.from_tau(q, m)

    planted = {}
    for r, t in enumerate(ts):
        items = []
        for i, (e, quad) in enumerate(exps):
            if e[r] == 0:
                continue
            val = signs[i]
            for r2, t2 in enumerate(ts):
                if r2 != r and e[r2]:
                    val *= (t - t2) ** e[r2]
            items.append((e[r], 1 if val > 0 else -1))
        if items:
            planted[complex(t, -m / 2)] = NormalFormBlocks.from_signed(items)
    label = f"critical m={m} n={n} degU={deg_u}"
    return CorpusMember(p, planted, label)


def semibounded_member(rng: np.random.Generator, n_max: int = 4) -> CorpusMember:
    """``q = S^star S`` for a random matrix polynomial ``S`` of degree at most two."""
    m = int(rng.integers(1, 4))
    n = int(rng.integers(1, n_max + 1))
    kind = rng.random()
    planted = {}
    if kind < 0.7:
        deg_u = int(rng.integers(0, 2)) if n > 1 else 0
        budget = 2 - deg_u
        t0 = _pick_critical_points(rng, 1)[0]
        entries, items = [], []
        for i in range(n):
            k = int(rng.integers(0, budget + 1))
            roots = []
            crit = 0
            for _ in range(k):
                if rng.random() < 0.6:
                    roots.append(t0)
                    crit += 1
                else:
                    roots.append(_pick_offline_point(rng, m) * (1 if rng.random() < 0.5 else -1))
            entries.append(_poly_from_roots(roots) * (0.5 + rng.random()))
            if crit:
                items.append((2 * crit, 1))
        S = poly_mul(_diag_poly(entries, n), random_unimodular(rng, n, deg_u))
        if items:
            planted[complex(t0, -m / 2)] = NormalFormBlocks.from_signed(items)
        label = f"semibounded-structured m={m} n={n}"
    else:
        deg = int(rng.integers(1, 3))
        S = [(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2) for _ in range(deg + 1)]
        label = f"semibounded-generic m={m} n={n}"
    q = trim(poly_mul(tau_star(S), S))
    return CorpusMember(PencilSpec.from_tau(q, m), planted, label)


def acceptable(member: CorpusMember, min_sep: float = 0.05, line_gap: float = 0.1) -> bool:
    """Reject members whose off-line roots crowd a line or each other."""
    from .errors import IndicialError
    from .roots import boundary_spectrum

    p = member.pencil
    try:
        roots = boundary_spectrum(p)
    except IndicialError:
        return False
    planted = list(member.planted)
    for r in roots:
        if r.band == "critical":
            if not any(abs(r.sigma0 - s) < 1e-6 for s in planted):
                return False
            continue
        for line in (0.0, -p.m / 2, -float(p.m)):
            if abs(r.sigma0.imag - line) < line_gap:
                return False
    for i, a in enumerate(roots):
        for b in roots[i + 1 :]:
            if abs(a.sigma0 - b.sigma0) < min_sep:
                return False
    return True


def critical_corpus(size: int, seed: int = 0, n_max: int = 6) -> list[CorpusMember]:
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < size:
        mem = critical_member(rng, n_max)
        if acceptable(mem):
            out.append(mem)
    return out


def semibounded_corpus(size: int, seed: int = 0, n_max: int = 4) -> list[CorpusMember]:
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < size:
        mem = semibounded_member(rng, n_max)
        if acceptable(mem):
            out.append(mem)
    return out
