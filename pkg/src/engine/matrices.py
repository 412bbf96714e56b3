"""Age-indexed transition matrices of the 8-state model.

Under the hypothesis of aggregation the matrix for entry age x at duration
k is the attained-age matrix at x + k, so one matrix per (context, age) is
built and kept in a bounded cache.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import pandas as pd

from ..estimators.context import EstimatorContext
from ..estimators.rates import transition_probabilities
from ..models.state_model import build_cii_model, check_matrix

logger = logging.getLogger(__name__)

CII_MODEL = build_cii_model()
N_STATES = CII_MODEL.size
# Holds both sexes over the whole age domain.
MATRIX_CACHE_SIZE = 256


class ProjectionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    age: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=float)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        if violations := check_matrix(CII_MODEL, entries):
            details = "; ".join(str(v) for v in violations)
            raise ProjectionError(f"matrix at age {self.age}: {details}")

    def q(self, i: int, j: int) -> float:
        return float(self.entries[i - 1, j - 1])


@lru_cache(maxsize=MATRIX_CACHE_SIZE)
def assemble(ctx: EstimatorContext, age: int) -> TransitionMatrix:
    """Q(s) following the model's sparsity; absorbing rows are unit loops."""
    entries = np.zeros((N_STATES, N_STATES))
    for (i, j), value in transition_probabilities(ctx, age).items():
        entries[i - 1, j - 1] = value
    for state in CII_MODEL.of_kind("absorbing"):
        entries[state - 1, state - 1] = 1.0
    logger.debug("assembled %s matrix at age %d", ctx.sex, age)
    return TransitionMatrix(int(age), entries)


@dataclass(frozen=True, eq=False)
class AggregationView:
    """Attained-age matrices addressed by (entry age, duration)."""

    ctx: EstimatorContext

    def at_age(self, age: int) -> TransitionMatrix:
        return assemble(self.ctx, age)

    def select(self, entry_age: int, duration: int) -> TransitionMatrix:
        return self.at_age(entry_age + duration)

    def sequence(self, entry_age: int, term: int) -> tuple[np.ndarray, ...]:
        """Q(0), ..., Q(term - 1) for a life entering at ``entry_age``."""
        return tuple(self.select(entry_age, k).entries for k in range(term))


def matrices_frame(matrices: Sequence[np.ndarray], entry_age: int) -> pd.DataFrame:
    """(k, age, i, j, value) rows for every entry the model allows."""
    allowed = CII_MODEL.mask()
    rows = [
        (k, entry_age + k, i + 1, j + 1, float(matrix[i, j]))
        for k, matrix in enumerate(matrices)
        for i, j in zip(*np.nonzero(allowed), strict=True)
    ]
    return pd.DataFrame(rows, columns=["k", "age", "i", "j", "value"])
