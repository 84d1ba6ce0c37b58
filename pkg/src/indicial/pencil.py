"""The indicial family ``p(sigma) = sum_j a_j sigma**j`` with its weight ``m``."""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import comb
from typing import Sequence

import numpy as np

from .errors import NotSymmetric, ValidationError
from .numerics import DEFAULT_TOL, MatrixSeries, Tolerances


def star(sigma: complex, m) -> complex:
    """Reflection about the critical line ``Im sigma = -m/2``."""
    return complex(sigma).conjugate() - 1j * m


@dataclass(frozen=True, eq=False)
class PencilSpec:
    """Matrix polynomial of degree ``mu`` with ``n x n`` coefficients and weight ``m``.

    Construction checks shapes and the nonvanishing of the top coefficient.
    Symmetry is checked separately by :func:`check_symmetry` (and enforced
    by :func:`load_pencil` / :meth:`validated`).
    """

    m: int
    coeffs: tuple

    def __init__(self, coeffs: Sequence, m: int):
        cs = [np.array(c, dtype=complex, ndmin=2) for c in coeffs]
        if not cs:
            raise ValidationError("pencil needs at least one coefficient")
        if int(m) != m or m <= 0:
            raise ValidationError("weight m must be a positive integer")
        n = cs[0].shape[0]
        for c in cs:
            if c.shape != (n, n):
                raise ValidationError("coefficients must be square and of equal size")
            if not np.all(np.isfinite(c)):
                raise ValidationError("coefficients must be finite")
        if not np.any(cs[-1]):
            raise ValidationError("leading coefficient a_mu vanishes")
        for c in cs:
            c.setflags(write=False)
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def mu(self) -> int:
        return len(self.coeffs) - 1

    @property
    def n(self) -> int:
        return self.coeffs[0].shape[0]

    @property
    def scale(self) -> float:
        return max(float(np.linalg.norm(c, 2)) for c in self.coeffs)

    def __call__(self, sigma: complex) -> np.ndarray:
        return evaluate(self, sigma)

    def __repr__(self):
        return f"PencilSpec(m={self.m}, mu={self.mu}, n={self.n})"

    def validated(self, tol: Tolerances = DEFAULT_TOL) -> "PencilSpec":
        if not check_symmetry(self, tol):
            raise NotSymmetric("pencil violates p(sigma*)^* = p(sigma)")
        return self

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_tau(cls, tau_coeffs: Sequence, m: int) -> "PencilSpec":
        """Pencil with ``p(sigma) = q(sigma + i m/2)`` for ``q(tau) = sum b_k tau**k``.

        ``p`` is symmetric exactly when every ``b_k`` is Hermitian.
        """
        return cls(shift_poly(tau_coeffs, 0.5j * m), m)

    @classmethod
    def scalar(cls, coeffs: Sequence[complex], m: int) -> "PencilSpec":
        return cls([[[c]] for c in coeffs], m)


def shift_poly(coeffs: Sequence, h: complex) -> list:
    """Coefficients of ``q(sigma + h)`` given those of ``q``."""
    cs = [np.array(c, dtype=complex, ndmin=2) for c in coeffs]
    out = [np.zeros_like(cs[0]) for _ in cs]
    for k, b in enumerate(cs):
        for j in range(k + 1):
            out[j] = out[j] + comb(k, j) * h ** (k - j) * b
    return out


def poly_mul(a: Sequence, b: Sequence) -> list:
    """Product of matrix polynomials given by coefficient lists (exact degree)."""
    a = [np.array(c, dtype=complex, ndmin=2) for c in a]
    b = [np.array(c, dtype=complex, ndmin=2) for c in b]
    out = [np.zeros((a[0].shape[0], b[0].shape[1]), dtype=complex) for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x @ y
    return out


def star_poly(coeffs: Sequence, m) -> list:
    """Coefficients of ``u^star(sigma) = u(sigma*)^*`` as a polynomial in sigma."""
    # u(conj(s) - im)^* = sum u_j^* (s + im)^j
    return shift_poly([np.array(c, dtype=complex, ndmin=2).conj().T for c in coeffs], 1j * m)


def trim(coeffs: Sequence, rel: float = 1e-13) -> list:
    cs = [np.array(c, dtype=complex, ndmin=2) for c in coeffs]
    scale = max(float(np.max(np.abs(c))) for c in cs)
    while len(cs) > 1 and float(np.max(np.abs(cs[-1]))) <= rel * scale:
        cs.pop()
    return cs


def congruence(p: PencilSpec, u: Sequence) -> PencilSpec:
    """``u^star(sigma) p(sigma) u(sigma)``; symmetric whenever ``p`` is."""
    left = star_poly(u, p.m)
    return PencilSpec(trim(poly_mul(poly_mul(left, p.coeffs), u)), p.m)


def direct_sum(*pencils: PencilSpec) -> PencilSpec:
    m = pencils[0].m
    if any(q.m != m for q in pencils):
        raise ValidationError("direct sum needs a common weight")
    mu = max(q.mu for q in pencils)
    n = sum(q.n for q in pencils)
    out = [np.zeros((n, n), dtype=complex) for _ in range(mu + 1)]
    off = 0
    for q in pencils:
        for j, c in enumerate(q.coeffs):
            out[j][off : off + q.n, off : off + q.n] = c
        off += q.n
    return PencilSpec(out, m)


# -- operations -------------------------------------------------------------------


def symmetry_defect(p: PencilSpec) -> float:
    """Largest deviation in the coefficient identity for ``p(sigma*)^* = p(sigma)``."""
    im = 1j * p.m
    worst = 0.0
    for k in range(p.mu + 1):
        acc = np.zeros_like(p.coeffs[0])
        for j in range(k, p.mu + 1):
            acc = acc + comb(j, k) * im ** (j - k) * p.coeffs[j].conj().T
        worst = max(worst, float(np.linalg.norm(acc - p.coeffs[k], 2)))
    return worst


def check_symmetry(p: PencilSpec, tol: Tolerances = DEFAULT_TOL) -> bool:
    return symmetry_defect(p) <= tol.rank_rel * p.scale


def evaluate(p: PencilSpec, sigma: complex) -> np.ndarray:
    out = np.zeros_like(p.coeffs[0])
    for c in reversed(p.coeffs):
        out = out * sigma + c
    return out


def taylor_at(p: PencilSpec, sigma0: complex, order: int) -> MatrixSeries:
    """Taylor coefficients ``p^(k)(sigma0)/k!`` for ``k = 0..order``."""
    shifted = shift_poly(p.coeffs, sigma0)
    zero = np.zeros_like(p.coeffs[0])
    return MatrixSeries([shifted[k] if k <= p.mu else zero for k in range(order + 1)])


# -- JSON ---------------------------------------------------------------------------


def pencil_to_dict(p: PencilSpec) -> dict:
    return {
        "m": p.m,
        "mu": p.mu,
        "n": p.n,
        "coeffs": [
            [[[float(z.real), float(z.imag)] for z in row] for row in c] for c in p.coeffs
        ],
    }


def pencil_from_dict(d: dict, tol: Tolerances = DEFAULT_TOL, check: bool = True) -> PencilSpec:
    try:
        m, mu, n = d["m"], d["mu"], d["n"]
        raw = d["coeffs"]
        if len(raw) != mu + 1:
            raise ValidationError(f"expected {mu + 1} coefficients, got {len(raw)}")
        coeffs = []
        for c in raw:
            arr = np.array(c, dtype=float)
            if arr.shape != (n, n, 2):
                raise ValidationError(f"coefficient has shape {arr.shape}, expected {(n, n, 2)}")
            coeffs.append(arr[..., 0] + 1j * arr[..., 1])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed pencil: {exc}") from exc
    p = PencilSpec(coeffs, m)
    return p.validated(tol) if check else p


def load_pencil(path, tol: Tolerances = DEFAULT_TOL, check: bool = True) -> PencilSpec:
    try:
        with open(path) as fh:
            d = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc}") from exc
    if not isinstance(d, dict):
        raise ValidationError("pencil JSON must be an object")
    return pencil_from_dict(d, tol, check)


def dump_pencil(p: PencilSpec, path) -> None:
    with open(path, "w") as fh:
        json.dump(pencil_to_dict(p), fh, indent=1)
