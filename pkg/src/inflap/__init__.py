"""Discrete infinity Laplacian on graphs: solver, games and ε-graph bridge."""

from .calculus import (
    barrier_field,
    barrier_guarantees,
    cca_ccb_probe,
    comparison_check,
    gradient_estimate_check,
    gradient_estimate_sweep,
    inf_laplacian,
    is_subsolution,
    is_supersolution,
    laplacian_field,
    liouville_probe,
    marching_check,
    residual,
)
from .errors import DomainError, InflapError, InputError, PreconditionError, TruncationError
from .graph import Graph, TruncationLimited, ball, boundary_of, diameter, distance, width_of
from .problem import DirichletProblem, Partition
from .solver import SolveOutcome, barrier_envelope, solve, solve_exact_amle, sweep, uniqueness_probe

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "TruncationLimited",
    "DirichletProblem",
    "Partition",
    "ball",
    "boundary_of",
    "diameter",
    "distance",
    "width_of",
    "inf_laplacian",
    "laplacian_field",
    "residual",
    "is_supersolution",
    "is_subsolution",
    "comparison_check",
    "marching_check",
    "gradient_estimate_check",
    "gradient_estimate_sweep",
    "barrier_field",
    "barrier_guarantees",
    "cca_ccb_probe",
    "liouville_probe",
    "solve",
    "solve_exact_amle",
    "sweep",
    "barrier_envelope",
    "uniqueness_probe",
    "SolveOutcome",
    "InflapError",
    "InputError",
    "DomainError",
    "TruncationError",
    "PreconditionError",
]
