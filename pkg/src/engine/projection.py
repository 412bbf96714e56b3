"""Forward recursion of the state occupancy distribution.

P(k+1) = P(k) Q(k), starting from P(0) concentrated on the healthy state
unless another initial distribution is given.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import pandas as pd

from ..data.tables import Sex
from ..estimators.context import EstimatorContext
from ..settings import SUPPORTED_AGES
from .matrices import CII_MODEL, N_STATES, AggregationView, ProjectionError

logger = logging.getLogger(__name__)

PROBABILITY_ATOL = 1e-12


def initial_distribution(p0: Sequence[float] | None = None) -> np.ndarray:
    """P(0): unit mass on the model's initial state when ``p0`` is None."""
    if p0 is None:
        vector = np.zeros(N_STATES)
        vector[CII_MODEL.index_of(CII_MODEL.initial)] = 1.0
        return vector
    vector = np.asarray(p0, dtype=float)
    if vector.shape != (N_STATES,):
        raise ProjectionError(f"initial distribution needs {N_STATES} entries")
    if np.any(vector < 0) or abs(vector.sum() - 1.0) > PROBABILITY_ATOL:
        raise ProjectionError("initial distribution must be a probability vector")
    return vector


@dataclass(frozen=True, eq=False)
class OccupancyTrajectory:
    sex: Sex | None
    entry_age: int
    vectors: np.ndarray  # (term + 1, N)
    matrices: tuple[np.ndarray, ...]  # Q(0) .. Q(term - 1)

    def __post_init__(self) -> None:
        vectors = np.array(self.vectors, dtype=float)
        vectors.setflags(write=False)
        object.__setattr__(self, "vectors", vectors)
        if vectors.ndim != 2 or vectors.shape[1] != N_STATES:
            raise ProjectionError(f"occupancy vectors must be (k, {N_STATES})")
        if len(self.matrices) != len(vectors) - 1:
            raise ProjectionError("need exactly one matrix per projected year")
        sums = vectors.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > PROBABILITY_ATOL):
            k = int(np.argmax(np.abs(sums - 1.0)))
            raise ProjectionError(f"P({k}) sums to {sums[k]:.15g}")

    @property
    def term(self) -> int:
        return len(self.matrices)

    def at(self, k: int) -> np.ndarray:
        return self.vectors[k]

    def state_probability(self, k: int, state: int) -> float:
        return float(self.vectors[k, CII_MODEL.index_of(state)])

    def absorbed(self) -> np.ndarray:
        """Probability mass in the absorbing states at each k."""
        cols = [CII_MODEL.index_of(s) for s in CII_MODEL.of_kind("absorbing")]
        return self.vectors[:, cols].sum(axis=1)

    def transition_mass(self, k: int) -> np.ndarray:
        """P_i(k) Q_ij(k): probability of making each move in year k."""
        return self.vectors[k][:, None] * self.matrices[k]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.vectors, columns=[f"p{s}" for s in CII_MODEL.ids])
        frame.insert(0, "age", self.entry_age + np.arange(self.term + 1))
        frame.insert(0, "k", np.arange(self.term + 1))
        if self.sex is not None:
            frame.insert(0, "sex", self.sex)
        return frame


def trajectory_from_matrices(
    matrices: Sequence[np.ndarray],
    entry_age: int = 0,
    sex: Sex | None = None,
    p0: Sequence[float] | None = None,
) -> OccupancyTrajectory:
    """Project any sequence of N x N row-stochastic matrices."""
    vectors = [initial_distribution(p0)]
    for matrix in matrices:
        vectors.append(vectors[-1] @ matrix)
    return OccupancyTrajectory(sex, entry_age, np.vstack(vectors), tuple(matrices))


def trajectory(
    ctx: EstimatorContext,
    entry_age: int,
    term: int,
    p0: Sequence[float] | None = None,
) -> OccupancyTrajectory:
    """P(0), ..., P(term) for a life entering the cover at ``entry_age``."""
    if term < 0:
        raise ProjectionError(f"term must be nonnegative, got {term}")
    if entry_age < SUPPORTED_AGES.lo or entry_age + term > SUPPORTED_AGES.hi:
        raise ProjectionError(
            f"ages {entry_age}..{entry_age + term} leave the supported domain "
            f"{SUPPORTED_AGES.lo}..{SUPPORTED_AGES.hi}"
        )
    logger.info("projecting %s from age %d for %d years", ctx.sex, entry_age, term)
    matrices = AggregationView(ctx).sequence(entry_age, term)
    return trajectory_from_matrices(matrices, entry_age, ctx.sex, p0)
