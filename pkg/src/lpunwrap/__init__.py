"""Lp-norm two-dimensional phase unwrapping.

Iteratively reweighted assembly of a weighted 5-point-stencil system solved by
preconditioned conjugate gradient, with five interchangeable no-fill-in
preconditioners and a scale-sweep benchmark harness.
"""

from .grid import GradientField, MapKind, PhaseMap, wrap_map, wrap_scalar, wrapped_gradients
from .metrics import congruence_error, q_error, q_error_mean_aligned
from .precond import PrecondKind, Preconditioner, build
from .solver import ExitReason, InitKind, SolveReport, SolverConfig, pcg_solve, unwrap
from .synth import SynthShape, SynthSpec, generate, table1_sizes

__all__ = [
    "GradientField",
    "MapKind",
    "PhaseMap",
    "wrap_map",
    "wrap_scalar",
    "wrapped_gradients",
    "congruence_error",
    "q_error",
    "q_error_mean_aligned",
    "PrecondKind",
    "Preconditioner",
    "build",
    "ExitReason",
    "InitKind",
    "SolveReport",
    "SolverConfig",
    "pcg_solve",
    "unwrap",
    "SynthShape",
    "SynthSpec",
    "generate",
    "table1_sizes",
]

__version__ = "0.1.0"
