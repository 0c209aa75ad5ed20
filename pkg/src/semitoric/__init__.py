"""Numerical symplectic invariants of semitoric integrable systems."""

from .catalog import (CoupledAngularMomenta, CoupledSpinOscillator,
                      TwoFocusFamily, cam_transition_times,
                      hirzebruch_toric_polygon, hirzebruch_transition_times,
                      make_system)
from .phasespace import (ManifoldDescriptor, PhasePoint, TangentVector, flow,
                         hamiltonian_vector_field, poisson_bracket)

__all__ = [
    "CoupledAngularMomenta",
    "CoupledSpinOscillator",
    "TwoFocusFamily",
    "ManifoldDescriptor",
    "PhasePoint",
    "TangentVector",
    "cam_transition_times",
    "hirzebruch_toric_polygon",
    "hirzebruch_transition_times",
    "make_system",
    "flow",
    "hamiltonian_vector_field",
    "poisson_bracket",
]

__version__ = "0.1.0"
