"""Exact symbolic calculus on the extended multiphase space of first-order field theory."""

from .coeff import Coord, CoordSystem, P, Poly, Q, W, X
from .exterior import Form, Multivector, contract, ext_d, lie_form, poincare_potential, schouten, wedge
from .multiphase import MultiphaseContext, canonical_structures, volume_family

__all__ = [
    "Coord",
    "CoordSystem",
    "P",
    "Poly",
    "Q",
    "W",
    "X",
    "Form",
    "Multivector",
    "contract",
    "ext_d",
    "lie_form",
    "poincare_potential",
    "schouten",
    "wedge",
    "MultiphaseContext",
    "canonical_structures",
    "volume_family",
]
