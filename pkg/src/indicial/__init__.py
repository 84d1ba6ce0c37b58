"""Numerical analysis of symmetric Fuchs-type indicial operators.

The package computes the indicial roots of a matrix pencil ``p(sigma)``,
the quotient ``D_max / D_min`` as an indefinite inner product space with its
generator, sign characteristics and signature, the spectral flow along the
critical line, and the boundary data of distinguished selfadjoint
extensions.  Independent oracles (normal-form reduction, spectral flow,
quadrature of the adjoint pairing) cross-check every invariant.
"""

__version__ = "0.1.0"

from .errors import IndicialError
from .numerics import Tolerances
from .pencil import PencilSpec, check_symmetry, evaluate, star, taylor_at
from .roots import Root, boundary_spectrum
from .extensions import build_quotient

__all__ = [
    "IndicialError",
    "PencilSpec",
    "Root",
    "Tolerances",
    "boundary_spectrum",
    "build_quotient",
    "check_symmetry",
    "evaluate",
    "star",
    "taylor_at",
]
