"""Independent numerical checks in function space.

Germs are realized as cutoff quasi-polynomials
``u(x) = omega(x) sum e x**(i sigma0) log(x)**k``.  The Fuchs operator
``A = x**-m sum_j a_j (x D_x)**j`` with ``x D_x = -i x d/dx`` is applied
exactly, ``L^2(dx/x)`` inner products are computed by adaptive quadrature in
``t = log x`` with an analytic tail near ``x = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import quad

from .errors import NonIntegrable, QuadratureNotConverged
from .germs import LogCoefficients
from .pencil import PencilSpec

TAIL_EPS = 1e-6
QUAD_RTOL = 1e-9
DROP_REL = 1e-9


def smoothstep(N: int) -> Polynomial:
    """Polynomial ``S`` of degree ``2N+1`` with ``S(0)=0``, ``S(1)=1`` and ``N`` vanishing derivatives at both ends."""
    c = np.zeros(2 * N + 2)
    for k in range(N + 1):
        c[N + 1 + k] = comb(N + k, k) * comb(2 * N + 1, N - k) * (-1) ** k
    return Polynomial(c)


@dataclass(frozen=True)
class CutoffSpec:
    """``omega = 1`` on ``(0, x_flat]``, ``0`` on ``[x_end, oo)``, smoothstep ramp in between.

    ``sharp=True`` gives the indicator of ``(0, x_flat)``; it is only used
    for inner products and Mellin transforms, never under the operator.
    """

    x_flat: float = 0.5
    x_end: float = 1.0
    smoothness: int = 3
    sharp: bool = False

    def __post_init__(self):
        if self.sharp:
            if not self.x_flat > 0:
                raise ValueError("indicator cutoff needs x_flat > 0")
            object.__setattr__(self, "x_end", self.x_flat)
        elif not 0 < self.x_flat < self.x_end:
            raise ValueError("cutoff needs 0 < x_flat < x_end")

    @classmethod
    def indicator(cls, x: float = 1.0) -> "CutoffSpec":
        return cls(x_flat=x, x_end=x, sharp=True)

    @classmethod
    def for_degree(cls, mu: int, x_flat: float = 0.5, x_end: float = 1.0) -> "CutoffSpec":
        return cls(x_flat, x_end, max(3, mu))

    def ramp(self) -> Polynomial:
        """``omega`` on the ramp as a polynomial in ``x``."""
        a, b = self.x_flat, self.x_end
        t = Polynomial([-a / (b - a), 1.0 / (b - a)])
        return 1.0 - smoothstep(self.smoothness)(t)

    def __call__(self, x: float) -> float:
        if x <= self.x_flat:
            return 1.0 if not (self.sharp and x == self.x_flat) else 0.0
        if x >= self.x_end:
            return 0.0
        return float(self.ramp()(x))


# -- quasi-polynomial term algebra ----------------------------------------------------------
# a "term map" is a dict {(sigma, k): vector} for sum vector * x**(i sigma) * log(x)**k


def _add(out: dict, key, vec):
    out[key] = out[key] + vec if key in out else np.array(vec, dtype=complex)


def _xdx(terms: dict) -> dict:
    """Apply ``x D_x = -i x d/dx`` exactly."""
    out: dict = {}
    for (s, k), v in terms.items():
        _add(out, (s, k), s * v)
        if k:
            _add(out, (s, k - 1), -1j * k * v)
    return out


def _eval_terms(terms: dict, x: float, n: int) -> np.ndarray:
    lx = np.log(x)
    acc = np.zeros(n, dtype=complex)
    for (s, k), v in terms.items():
        acc += v * np.exp(1j * s * lx) * lx**k
    return acc


def _prune(terms: dict, scale: float) -> dict:
    return {key: v for key, v in terms.items() if np.linalg.norm(v) > DROP_REL * scale}


@dataclass(frozen=True, eq=False)
class QuasiPolynomial:
    terms: tuple  # of (sigma0, j, e)
    cutoff: CutoffSpec = field(default_factory=CutoffSpec)

    @property
    def n(self) -> int:
        return len(self.terms[0][2])

    def term_map(self) -> dict:
        out: dict = {}
        for s, j, e in self.terms:
            _add(out, (complex(s), int(j)), np.asarray(e, dtype=complex))
        return out

    @classmethod
    def from_log_coeffs(cls, u: LogCoefficients, cutoff: Optional[CutoffSpec] = None) -> "QuasiPolynomial":
        e = np.atleast_2d(u.e)
        terms = tuple((complex(u.sigma0), j, e[j]) for j in range(e.shape[0]) if np.any(e[j]))
        if not terms:
            terms = ((complex(u.sigma0), 0, np.zeros(e.shape[1], dtype=complex)),)
        return cls(terms, cutoff or CutoffSpec())

    def __call__(self, x: float) -> np.ndarray:
        return self.cutoff(x) * _eval_terms(self.term_map(), x, self.n)

    def piecewise(self) -> "Piecewise":
        tm = self.term_map()
        c = self.cutoff
        if c.sharp:
            return Piecewise(tm, c.x_flat, c.x_flat, None, self.n)
        w = c.ramp()
        return Piecewise(tm, c.x_flat, c.x_end, lambda x: float(w(x)) * _eval_terms(tm, x, self.n), self.n)


@dataclass(frozen=True, eq=False)
class Piecewise:
    """``flat`` terms on ``(0, x_flat]``, ``ramp(x)`` on ``(x_flat, x_end)``, zero beyond."""

    flat: dict
    x_flat: float
    x_end: float
    ramp: Optional[Callable]
    n: int

    def __call__(self, x: float) -> np.ndarray:
        if x <= self.x_flat:
            return _eval_terms(self.flat, x, self.n)
        if x >= self.x_end or self.ramp is None:
            return np.zeros(self.n, dtype=complex)
        return self.ramp(x)


def apply_operator(p: PencilSpec, u: QuasiPolynomial) -> Piecewise:
    """``A u`` for ``A = x**-m sum_j a_j (x D_x)**j`` as an exact piecewise evaluator."""
    c = u.cutoff
    if c.sharp:
        raise ValueError("the operator cannot be applied to a sharply cut off function")
    if c.smoothness < p.mu - 1:
        raise ValueError(f"cutoff of smoothness {c.smoothness} is too rough for degree {p.mu}")
    q = u.term_map()
    powers = [q]
    for _ in range(p.mu):
        powers.append(_xdx(powers[-1]))
    # (x D_x)^r omega on the ramp: x^k -> (-i k)^r x^k
    w = c.ramp().coef
    wr = [Polynomial(w * (-1j * np.arange(w.size)) ** r) for r in range(p.mu + 1)]
    # flat region: omega = 1, so Au = x^-m sum_j a_j (x D_x)^j q; fold x^-m into the exponent
    flat: dict = {}
    for j, a in enumerate(p.coeffs):
        for (s, k), v in powers[j].items():
            _add(flat, (s + 1j * p.m, k), a @ v)
    scale = max(1.0, max((np.linalg.norm(v) for pw in powers for v in pw.values()), default=1.0)) * p.scale
    flat = _prune(flat, scale)
    n, m = p.n, p.m

    def ramp(x: float) -> np.ndarray:
        vals = [_eval_terms(pw, x, n) for pw in powers]
        wv = [complex(P(x)) for P in wr]
        acc = np.zeros(n, dtype=complex)
        for j, a in enumerate(p.coeffs):
            inner = np.zeros(n, dtype=complex)
            for r in range(j + 1):
                inner += comb(j, r) * wv[r] * vals[j - r]
            acc += a @ inner
        return acc * x ** (-m)

    return Piecewise(flat, c.x_flat, c.x_end, ramp, n)


# -- integrals ---------------------------------------------------------------------------------


def _power_log_integral(delta: complex, k: int, eps: float) -> complex:
    """``int_0^eps x**(delta-1) log(x)**k dx`` for ``Re delta > 0``."""
    le = np.log(eps)
    e_d = np.exp(delta * le)
    I = e_d / delta
    for kk in range(1, k + 1):
        I = e_d * le**kk / delta - (kk / delta) * I
    return complex(I)


def _as_piecewise(f) -> Piecewise:
    return f.piecewise() if isinstance(f, QuasiPolynomial) else f


def _quad(func, a, b) -> complex:
    if b <= a:
        return 0j
    val, err = quad(func, a, b, complex_func=True, epsabs=1e-14, epsrel=1e-11, limit=400)
    if abs(err) > QUAD_RTOL * max(abs(val), 1e-3):
        raise QuadratureNotConverged(f"quadrature error {err:.3g} on [{a:.3g}, {b:.3g}]")
    return complex(val)


def l2b_inner(f, g, eps: float = TAIL_EPS) -> complex:
    """``int_0^oo <f(x), g(x)> dx/x`` (antilinear in ``g``)."""
    f, g = _as_piecewise(f), _as_piecewise(g)
    tail = 0j
    for (s1, k1), v1 in f.flat.items():
        for (s2, k2), v2 in g.flat.items():
            c = np.vdot(v2, v1)
            if c == 0:
                continue
            delta = 1j * (s1 - np.conj(s2))
            if delta.real <= 0:
                raise NonIntegrable(f"x**(i {s1}) against x**(i {s2}) is not integrable at 0")
            tail += c * _power_log_integral(delta, k1 + k2, eps)
    hi = max(f.x_end, g.x_end)
    if hi <= eps:
        return complex(tail)
    cuts = sorted({np.log(eps), np.log(hi)} | {np.log(x) for x in (f.x_flat, f.x_end, g.x_flat, g.x_end) if eps < x < hi})
    integrand = lambda t: np.vdot(g(np.exp(t)), f(np.exp(t)))
    body = sum(_quad(integrand, a, b) for a, b in zip(cuts[:-1], cuts[1:]))
    return complex(tail + body)


def pairing_direct(p: PencilSpec, u: QuasiPolynomial, v: QuasiPolynomial, eps: float = TAIL_EPS) -> complex:
    """Adjoint pairing ``(1/i)(<A u, v> - <u, A v>)`` by quadrature."""
    Au, Av = apply_operator(p, u), apply_operator(p, v)
    return complex((l2b_inner(Au, v, eps) - l2b_inner(u, Av, eps)) / 1j)


def mellin_numeric(u: QuasiPolynomial, sigma: complex, eps: float = TAIL_EPS) -> np.ndarray:
    """``(M u)(sigma) = int_0^oo x**(-i sigma) u(x) dx/x`` (converges for ``Im sigma > Im sigma0``)."""
    f = u.piecewise()
    tail = np.zeros(f.n, dtype=complex)
    for (s, k), v in f.flat.items():
        delta = 1j * (s - sigma)
        if delta.real <= 0:
            raise NonIntegrable(f"Mellin integral diverges at 0 for sigma={sigma}")
        tail += v * _power_log_integral(delta, k, eps)
    hi = f.x_end
    if hi <= eps:
        return tail
    cuts = sorted({np.log(eps), np.log(hi)} | {np.log(x) for x in (f.x_flat,) if eps < x < hi})
    out = tail.copy()
    for i in range(f.n):
        integrand = lambda t, i=i: np.exp(-1j * sigma * t) * f(np.exp(t))[i]
        out[i] += sum(_quad(integrand, a, b) for a, b in zip(cuts[:-1], cuts[1:]))
    return out
