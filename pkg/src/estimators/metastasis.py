"""Transitions out of the cancer-without-metastases state.

The yearly chance of a metastasis diagnosis is a logistic regression on
age. Below 45 too few patients exist, so the value at 45 is used (nearest
neighbour). Men have two separate fits, 45..59 and above 59.
"""

import logging

from scipy.special import expit

from .context import EstimatorContext, EstimatorError

logger = logging.getLogger(__name__)

NEAREST_NEIGHBOUR_AGE = 45
MALE_SEGMENT_END = 59


def varrho(ctx: EstimatorContext, age: int) -> float:
    """Probability that a patient without metastases gets them this year."""
    age = max(ctx.check_age(age), NEAREST_NEIGHBOUR_AGE)
    c = ctx.coeffs
    if ctx.sex == "female":
        # The female fit has no intercept.
        return float(expit(c.female_varrho_slope * age))
    if age <= MALE_SEGMENT_END:
        return float(expit(c.male_varrho_young_const + c.male_varrho_young_slope * age))
    return float(expit(c.male_varrho_old_const + c.male_varrho_old_slope * age))


def q2_row(ctx: EstimatorContext, age: int) -> tuple[float, float, float]:
    """(q22, q23, q27); cancer patients die at the all-cause rate q_s."""
    q = ctx.q(ctx.check_age(age))
    q23 = varrho(ctx, age)
    q22 = 1.0 - q - q23
    if q22 < 0.0:
        raise EstimatorError(
            f"{ctx.sex} age {age}: q_s + varrho = {q + q23} exceeds 1"
        )
    return q22, q23, q


def varrho_segment_jump(ctx: EstimatorContext) -> float:
    """Jump of the male metastasis probability between ages 59 and 60.

    The two male fits are not blended; the jump is reported, not smoothed.
    Zero for women.
    """
    jump = varrho(ctx, MALE_SEGMENT_END + 1) - varrho(ctx, MALE_SEGMENT_END)
    if jump:
        logger.warning(
            "%s metastasis probability jumps by %+.6f between ages %d and %d",
            ctx.sex,
            jump,
            MALE_SEGMENT_END,
            MALE_SEGMENT_END + 1,
        )
    return jump
