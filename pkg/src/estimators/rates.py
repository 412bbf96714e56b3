"""All transition probabilities of the 8-state model at one attained age."""

import pandas as pd

from ..models.state_model import Transition
from .active import q11, q12, q13, q17
from .context import EstimatorContext
from .metastasis import q2_row
from .terminal import terminal_probs

# Column order of rate exports; grouped by origin state.
RATE_KEYS: tuple[Transition, ...] = (
    (1, 1),
    (1, 2),
    (1, 3),
    (1, 7),
    (2, 2),
    (2, 3),
    (2, 7),
    (3, 4),
    (3, 8),
    (4, 5),
    (4, 8),
    (5, 6),
    (5, 8),
    (6, 8),
)


def rate_column(key: Transition) -> str:
    return f"q{key[0]}{key[1]}"


def transition_probabilities(
    ctx: EstimatorContext, age: int
) -> dict[Transition, float]:
    """q_ij(s) for every (i, j) in RATE_KEYS; each origin's group sums to 1."""
    q22, q23, q27 = q2_row(ctx, age)
    terminal = terminal_probs(ctx, age)
    rates = {
        (1, 1): q11(ctx, age),
        (1, 2): q12(ctx, age),
        (1, 3): q13(ctx, age),
        (1, 7): q17(ctx, age),
        (2, 2): q22,
        (2, 3): q23,
        (2, 7): q27,
    }
    for state in (3, 4, 5):
        death = terminal.death(state)
        rates[state, state + 1] = 1.0 - death
        rates[state, 8] = death
    rates[6, 8] = terminal.q68
    return {key: rates[key] for key in RATE_KEYS}


def rates_frame(ctx: EstimatorContext, ages: range) -> pd.DataFrame:
    """One row per attained age, one column per q_ij."""
    rows = []
    for age in ages:
        rates = transition_probabilities(ctx, age)
        rows.append(
            {"sex": ctx.sex, "age": age}
            | {rate_column(key): value for key, value in rates.items()}
        )
    return pd.DataFrame(rows)
