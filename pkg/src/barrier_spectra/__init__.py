"""Complex eigenvalues of half-line Schrodinger operators with a finite
imaginary barrier, and numerical checks of bounds on their location and count."""

from .core import Enclosure, GammaStrip, lambert_w, sqrt_upper
from .eigen import (
    EigenvalueSet,
    ZRegion,
    f_closed_zero,
    f_general,
    locate_eigenvalues,
    winding_count,
)
from .potentials import make_potential, parse_potential
from .schrodinger import Problem, solve_jost, solve_theta

__all__ = [
    "Enclosure",
    "EigenvalueSet",
    "GammaStrip",
    "Problem",
    "ZRegion",
    "f_closed_zero",
    "f_general",
    "lambert_w",
    "locate_eigenvalues",
    "make_potential",
    "parse_potential",
    "solve_jost",
    "solve_theta",
    "sqrt_upper",
    "winding_count",
]
