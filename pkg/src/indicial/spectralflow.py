"""Spectral flow of the Hermitian family ``t -> p(sigma0 + t)`` across critical roots."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import AmbiguousWindow
from .forms import _require_critical
from .numerics import DEFAULT_TOL, Tolerances, nullspace
from .pencil import PencilSpec, evaluate
from .roots import boundary_spectrum

MIN_SAMPLES = 33
NOISE_REL = 1e-12


@dataclass(frozen=True)
class FlowResult:
    sigma0: complex
    delta: float
    eps0: float
    sf: int


def _eigs(p: PencilSpec, sigma: complex) -> np.ndarray:
    A = evaluate(p, sigma)
    return np.linalg.eigvalsh(0.5 * (A + A.conj().T))


def _window(p: PencilSpec, sigma0: complex, delta: float, z: int, samples: int):
    """Separation data ``(a, b)`` for the ``z`` small eigenvalue branches on ``[-delta, delta]``."""
    a, b = 0.0, np.inf
    for t in np.linspace(-delta, delta, samples):
        mags = np.sort(np.abs(_eigs(p, sigma0 + t)))
        a = max(a, mags[z - 1])
        if z < mags.size:
            b = min(b, mags[z])
    return a, b


def sf_at_root(
    p: PencilSpec,
    sigma0: complex,
    tol: Tolerances = DEFAULT_TOL,
    roots=None,
    samples: int = MIN_SAMPLES,
) -> FlowResult:
    """Net number of eigenvalues of ``p(sigma0 + t)`` crossing zero upwards at ``t = 0``.

    ``delta`` is at most half the distance to any other root, so the only
    zero crossing on ``[-delta, delta]`` happens at ``t = 0`` and the flow is
    the drop in the number of negative eigenvalues between the two ends.
    ``eps0`` (geometric mean of the largest vanishing branch and the smallest
    other branch over the interval) is reported as a separation diagnostic.
    """
    sigma0 = complex(sigma0)
    _require_critical(sigma0, p.m)
    if roots is None:
        roots = boundary_spectrum(p, tol)
    others = [abs(r.sigma0 - sigma0) for r in roots if abs(r.sigma0 - sigma0) > tol.root_cluster]
    delta = min(0.1, 0.5 * min(others)) if others else 0.1
    z = nullspace(evaluate(p, sigma0), Tolerances(rank_rel=max(tol.rank_rel, 1e-8)), scale=p.scale).shape[1]
    if z == 0:
        return FlowResult(sigma0, delta, 0.0, 0)
    a, b = _window(p, sigma0, delta, z, max(samples, MIN_SAMPLES))
    eps0 = 2.0 * a if np.isinf(b) else float(np.sqrt(a * b))
    plus = _eigs(p, sigma0 + delta)
    minus = _eigs(p, sigma0 - delta)
    floor = NOISE_REL * p.scale * (1.0 + abs(sigma0) + delta) ** p.mu
    if min(np.min(np.abs(plus)), np.min(np.abs(minus))) <= floor:
        raise AmbiguousWindow(f"eigenvalue signs at {sigma0} +- {delta:.3g} are below the noise floor")
    neg = lambda w: int(np.sum(w < 0))
    return FlowResult(sigma0, float(delta), float(eps0), neg(minus) - neg(plus))


def sf_total(p: PencilSpec, tol: Tolerances = DEFAULT_TOL, roots=None) -> int:
    if roots is None:
        roots = boundary_spectrum(p, tol)
    return sum(sf_at_root(p, r.sigma0, tol, roots).sf for r in roots if r.band == "critical")
