"""
Moving-frame quantum mechanics for the free particle and harmonic oscillator.

Dense grid operators, evolution-transformed position and momentum, closed-form
transformation kernels, and the classical Hamilton-Jacobi route to the same
kernels, each paired with a numerical check that returns a ``CheckReport``.
"""

from .errors import (
    DomainError,
    GridError,
    GridMismatchError,
    MovingPictureError,
    NonHermitianError,
    SingularTimeError,
)
from .hilbert import (
    DenseOperator,
    Grid,
    System,
    SystemParams,
    WaveFunction,
    gaussian_packet,
    hamiltonian,
    make_grid,
    momentum_operator,
    position_operator,
)
from .report import CheckReport
from .special import hermite, hermite_functions
from .evolution import MovingFrame, evolution_operator, evolve, make_frame
from .kernels import KernelSpec, Representation, kernel
from .hamilton_jacobi import GFRepresentation, GeneratingFunction, generating, quantum_action

__version__ = "0.1.0"

__all__ = [
    "CheckReport",
    "DenseOperator",
    "DomainError",
    "GFRepresentation",
    "GeneratingFunction",
    "Grid",
    "GridError",
    "GridMismatchError",
    "KernelSpec",
    "MovingFrame",
    "MovingPictureError",
    "NonHermitianError",
    "Representation",
    "SingularTimeError",
    "System",
    "SystemParams",
    "WaveFunction",
    "evolution_operator",
    "evolve",
    "gaussian_packet",
    "generating",
    "hamiltonian",
    "hermite",
    "hermite_functions",
    "kernel",
    "make_frame",
    "make_grid",
    "momentum_operator",
    "position_operator",
    "quantum_action",
]
