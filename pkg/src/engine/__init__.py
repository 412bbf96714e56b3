"""Markov engine: matrices, projection, simulation and synthetic tables."""

from .idtable import (
    TRANSITIONS,
    IncrementDecrementTable,
    recover_probabilities,
    round_trip_error,
    synthesize_from_matrices,
    synthesize_idtable,
)
from .matrices import (
    CII_MODEL,
    MATRIX_CACHE_SIZE,
    N_STATES,
    AggregationView,
    ProjectionError,
    TransitionMatrix,
    assemble,
    matrices_frame,
)
from .projection import (
    OccupancyTrajectory,
    initial_distribution,
    trajectory,
    trajectory_from_matrices,
)
from .simulation import (
    BIT_GENERATORS,
    SimulationResult,
    simulate,
    simulate_matrices,
)

__all__ = [
    "BIT_GENERATORS",
    "CII_MODEL",
    "MATRIX_CACHE_SIZE",
    "N_STATES",
    "TRANSITIONS",
    "AggregationView",
    "IncrementDecrementTable",
    "OccupancyTrajectory",
    "ProjectionError",
    "SimulationResult",
    "TransitionMatrix",
    "assemble",
    "initial_distribution",
    "matrices_frame",
    "recover_probabilities",
    "round_trip_error",
    "simulate",
    "simulate_matrices",
    "synthesize_from_matrices",
    "synthesize_idtable",
    "trajectory",
    "trajectory_from_matrices",
]
