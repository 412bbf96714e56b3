"""Metastatic survival: the distribution of years survived, T_s in {0..3}.

Men follow an ordered logit with cumulative splits P(T<=1), P(T<=2); the
mass of P(T<=1) is shared between T=0 and T=1 with cohort weights w0, w1.
Women follow a Poisson law with identity link, lambda = const + slope * s,
with the tail above two years lumped into T=3. Both models use the value at
age 40 for younger patients (nearest neighbour).

Death probabilities of the reflex states 3..6 are the hazards of T_s:
q_{i8} = P(T = i-3 | T > i-4), and q68 = 1 since nobody survives four years.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit
from scipy.stats import poisson

from .context import EstimatorContext, EstimatorError

NEAREST_NEIGHBOUR_AGE = 40
MAX_YEARS_SURVIVED = 3


@dataclass(frozen=True)
class TerminalDeathProbs:
    q38: float
    q48: float
    q58: float
    q68: float = 1.0

    def __post_init__(self) -> None:
        for name in ("q38", "q48", "q58"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise EstimatorError(f"{name} = {value} not in [0, 1]")
        if self.q68 != 1.0:
            raise EstimatorError("q68 must be exactly 1")

    def death(self, state: int) -> float:
        """q_{i8} for a metastatic state i in 3..6."""
        return {3: self.q38, 4: self.q48, 5: self.q58, 6: self.q68}[state]


def _male_pmf(ctx: EstimatorContext, age: int) -> np.ndarray:
    c = ctx.coeffs
    within_one = float(expit(c.male_terminal_slope * age))
    within_two = float(expit(c.male_terminal_const3 + c.male_terminal_slope * age))
    return np.array(
        [
            c.male_terminal_w0 * within_one,
            c.male_terminal_w1 * within_one,
            within_two - within_one,
            1.0 - within_two,
        ]
    )


def poisson_mean(ctx: EstimatorContext, age: int) -> float:
    c = ctx.coeffs
    mean = c.female_terminal_const + c.female_terminal_slope * age
    if mean <= 0.0:
        raise EstimatorError(
            f"Poisson mean {mean} <= 0 at age {age}: beyond the survival model"
        )
    return mean


def _female_pmf(ctx: EstimatorContext, age: int) -> np.ndarray:
    head = poisson.pmf(np.arange(MAX_YEARS_SURVIVED), poisson_mean(ctx, age))
    return np.append(head, 1.0 - head.sum())


def survival_pmf(ctx: EstimatorContext, age: int) -> np.ndarray:
    """P(T_s = k) for k = 0..3."""
    age = max(ctx.check_age(age), NEAREST_NEIGHBOUR_AGE)
    pmf = _male_pmf(ctx, age) if ctx.sex == "male" else _female_pmf(ctx, age)
    pmf.setflags(write=False)
    return pmf


def terminal_probs_male(ctx: EstimatorContext, age: int) -> TerminalDeathProbs:
    age = max(ctx.check_age(age), NEAREST_NEIGHBOUR_AGE)
    c = ctx.coeffs
    m = float(expit(c.male_terminal_slope * age))
    within_two = float(expit(c.male_terminal_const3 + c.male_terminal_slope * age))
    return TerminalDeathProbs(
        q38=c.male_terminal_w0 * m,
        q48=c.male_terminal_w1 * m / (1.0 - c.male_terminal_w0 * m),
        # P(T=2) / P(T>1): the denominator is 1 - m(s).
        q58=(within_two - m) / (1.0 - m),
    )


def terminal_probs_female(ctx: EstimatorContext, age: int) -> TerminalDeathProbs:
    age = max(ctx.check_age(age), NEAREST_NEIGHBOUR_AGE)
    w = poisson_mean(ctx, age)
    e = np.exp(-w)
    return TerminalDeathProbs(
        q38=float(e),
        q48=float(w * e / (1.0 - e)),
        q58=float(0.5 * w**2 * e / (1.0 - (1.0 + w) * e)),
    )


def terminal_probs(ctx: EstimatorContext, age: int) -> TerminalDeathProbs:
    if ctx.sex == "male":
        return terminal_probs_male(ctx, age)
    return terminal_probs_female(ctx, age)


def first_year_death_gap(ctx: EstimatorContext, age: int) -> float:
    """Fitted P(T=0) at ``age`` minus the cohort's empirical share.

    A sanity band only: the cohort's age mix is not part of the data.
    """
    empirical = ctx.coeffs.empirical_survival.get(ctx.sex)
    if not empirical:
        raise EstimatorError(f"no empirical survival distribution for {ctx.sex}")
    return float(survival_pmf(ctx, age)[0]) - empirical[0]
