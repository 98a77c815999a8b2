"""Simulator for vortex braiding in the honeycomb spin model on optical lattices.

Two exact engines (a stabilizer tableau and a dense state vector), a braid
compiler for pulse protocols, a correlator readout simulator and an
experimental error-budget calculator.
"""

__version__ = "0.1.0"

from .lattice import Boundary, Flavor, Lattice, LinkType, build, plaquette_operator, zlink_neighbors
from .pauli import Angle, PauliString, Protocol, Pulse, commutes, multiply, reduce_protocol
from .stabilizer import StabilizerState, apply_pulse, expect, measure, prepare_ground, syndrome

__all__ = [
    "__version__",
    "Angle",
    "Boundary",
    "Flavor",
    "Lattice",
    "LinkType",
    "PauliString",
    "Protocol",
    "Pulse",
    "StabilizerState",
    "apply_pulse",
    "build",
    "commutes",
    "expect",
    "measure",
    "multiply",
    "plaquette_operator",
    "prepare_ground",
    "reduce_protocol",
    "syndrome",
    "zlink_neighbors",
]
