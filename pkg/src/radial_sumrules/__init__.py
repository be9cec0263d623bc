"""Bound states of the radial Schroedinger equation and the sum rules they obey."""

from .potentials import NATURAL, PotentialSpec, Units, make
from .spectrum import BoundState, bound_state, closed_form_state, numerov_solve
from .wavefunctions import RadialWavefunction, build, origin_coefficient

__all__ = [
    "NATURAL",
    "PotentialSpec",
    "Units",
    "make",
    "BoundState",
    "bound_state",
    "closed_form_state",
    "numerov_solve",
    "RadialWavefunction",
    "build",
    "origin_coefficient",
]

__version__ = "0.1.0"
