"""Increment-decrement tables: expected lives and moves per attained age.

l^i_s counts lives in state i at exact age s out of a radix of healthy lives
at the first age; d^{ij}_s counts moves i -> j during year s. For the
absorbing states l is cumulative deaths. Lives follow

    l^i_{s+1} = l^i_s - sum_j d^{ij}_s + sum_j d^{ji}_s

and the transition probabilities are recovered as d^{ij}_s / l^i_s.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import pandas as pd

from ..estimators.context import EstimatorContext
from ..models.state_model import Transition
from ..settings import SUPPORTED_AGES, load_settings
from .matrices import CII_MODEL, N_STATES, AggregationView, ProjectionError

logger = logging.getLogger(__name__)

TRANSITIONS: tuple[Transition, ...] = tuple(CII_MODEL.ordered_transitions())


def decrement_column(transition: Transition) -> str:
    return f"d{transition[0]}{transition[1]}"


@dataclass(frozen=True, eq=False)
class IncrementDecrementTable:
    radix: float
    first_age: int
    lives: np.ndarray  # (m + 1, N)
    decrements: np.ndarray  # (m, len(TRANSITIONS))

    def __post_init__(self) -> None:
        for name in ("lives", "decrements"):
            array = np.array(getattr(self, name), dtype=float)
            array.setflags(write=False)
            object.__setattr__(self, name, array)
        if self.lives.shape[1:] != (N_STATES,):
            raise ProjectionError(f"lives must have {N_STATES} columns")
        if self.decrements.shape != (len(self.lives) - 1, len(TRANSITIONS)):
            raise ProjectionError("decrements need one row per year of the table")

    @property
    def ages(self) -> range:
        return range(self.first_age, self.first_age + len(self.lives))

    def lives_of(self, state: int) -> np.ndarray:
        return self.lives[:, CII_MODEL.index_of(state)]

    def moves(self, i: int, j: int) -> np.ndarray:
        try:
            return self.decrements[:, TRANSITIONS.index((i, j))]
        except ValueError as error:
            raise ProjectionError(f"({i}, {j}) is not a transition") from error

    def flows(self) -> tuple[np.ndarray, np.ndarray]:
        """Outflow and inflow of every state in every year, shape (m, N)."""
        out = np.zeros((len(self.decrements), N_STATES))
        into = np.zeros_like(out)
        for col, (i, j) in enumerate(TRANSITIONS):
            out[:, CII_MODEL.index_of(i)] += self.decrements[:, col]
            into[:, CII_MODEL.index_of(j)] += self.decrements[:, col]
        return out, into

    def recurrence_residual(self) -> float:
        """Largest |l_{s+1} - (l_s - out_s + in_s)| over states and ages."""
        out, into = self.flows()
        gap = self.lives[1:] - (self.lives[:-1] - out + into)
        return float(np.max(np.abs(gap))) if gap.size else 0.0

    def conservation_residual(self) -> float:
        """Largest |sum_i l^i_s - radix|; lives plus cumulative deaths are fixed."""
        return float(np.max(np.abs(self.lives.sum(axis=1) - self.radix)))

    def to_frame(self, *, rounded: bool = False) -> pd.DataFrame:
        """Ages as rows, l columns then d columns; the last age has no moves."""
        lives = pd.DataFrame(self.lives, columns=[f"l{s}" for s in CII_MODEL.ids])
        moves = pd.DataFrame(
            self.decrements, columns=[decrement_column(t) for t in TRANSITIONS]
        )
        frame = pd.concat([lives, moves], axis=1)
        if rounded:
            frame = frame.round().astype("Int64")
        frame.insert(0, "age", list(self.ages))
        return frame


def synthesize_from_matrices(
    matrices: Sequence[np.ndarray], radix: float, first_age: int
) -> IncrementDecrementTable:
    """Run a radix of healthy lives through Q(first_age), Q(first_age + 1), ..."""
    if radix <= 0:
        raise ProjectionError(f"radix must be positive, got {radix}")
    start = np.zeros(N_STATES)
    start[CII_MODEL.index_of(CII_MODEL.initial)] = radix
    lives = [start]
    decrements = []
    rows = [CII_MODEL.index_of(i) for i, _ in TRANSITIONS]
    cols = [CII_MODEL.index_of(j) for _, j in TRANSITIONS]
    for matrix in matrices:
        current = lives[-1]
        moves = current[rows] * np.asarray(matrix)[rows, cols]
        nxt = current.copy()
        np.subtract.at(nxt, rows, moves)
        np.add.at(nxt, cols, moves)
        lives.append(nxt)
        decrements.append(moves)
    return IncrementDecrementTable(
        radix,
        first_age,
        np.vstack(lives),
        np.array(decrements).reshape(len(decrements), len(TRANSITIONS)),
    )


def synthesize_idtable(
    ctx: EstimatorContext,
    radix: float | None = None,
    start_age: int | None = None,
    end_age: int | None = None,
) -> IncrementDecrementTable:
    """Expected table for one sex over ``start_age..end_age`` inclusive."""
    start_age = SUPPORTED_AGES.lo if start_age is None else start_age
    end_age = SUPPORTED_AGES.hi if end_age is None else end_age
    if not SUPPORTED_AGES.lo <= start_age <= end_age <= SUPPORTED_AGES.hi:
        raise ProjectionError(f"table ages {start_age}..{end_age} are not supported")
    radix = load_settings().radix if radix is None else radix
    logger.info("synthesizing %s table %d..%d", ctx.sex, start_age, end_age)
    matrices = AggregationView(ctx).sequence(start_age, end_age - start_age)
    return synthesize_from_matrices(matrices, radix, start_age)


def recover_probabilities(
    table: IncrementDecrementTable,
) -> dict[Transition, np.ndarray]:
    """q_ij(s) = d^{ij}_s / l^i_s and q_ii(s) = (l^i_{s+1} - inflow) / l^i_s.

    Entries are NaN where l^i_s = 0. Absorbing states are omitted.
    """
    out, into = table.flows()
    current = table.lives[:-1]
    occupied = current > 0

    def ratio(numerator: np.ndarray, pos: int) -> np.ndarray:
        return np.divide(
            numerator,
            current[:, pos],
            out=np.full(len(current), np.nan),
            where=occupied[:, pos],
        )

    recovered: dict[Transition, np.ndarray] = {}
    for state in CII_MODEL.ids:
        if CII_MODEL.state(state).kind == "absorbing":
            continue
        pos = CII_MODEL.index_of(state)
        stay = table.lives[1:, pos] - into[:, pos]
        recovered[state, state] = ratio(stay, pos)
        for j in CII_MODEL.successors(state):
            recovered[state, j] = ratio(table.moves(state, j), pos)
    return recovered


def round_trip_error(
    table: IncrementDecrementTable, matrices: Sequence[np.ndarray]
) -> float:
    """Largest gap between recovered and generating probabilities."""
    worst = 0.0
    for (i, j), recovered in recover_probabilities(table).items():
        row, col = CII_MODEL.index_of(i), CII_MODEL.index_of(j)
        given = np.array([m[row, col] for m in matrices])
        gaps = np.abs(recovered - given)[~np.isnan(recovered)]
        if gaps.size:
            worst = max(worst, float(gaps.max()))
    return worst
