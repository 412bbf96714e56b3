"""Transitions out of the healthy state: rows q11, q12, q13, q17.

Incidence splits into diagnoses with and without metastases by the share
beta; deaths of healthy lives are all-cause deaths less cancer deaths.
"""

from .context import EstimatorContext, EstimatorError


def q12(ctx: EstimatorContext, age: int) -> float:
    age = ctx.check_age(age)
    return ctx.zeta.lookup(age) * (1.0 - ctx.beta.lookup(age))


def q13(ctx: EstimatorContext, age: int) -> float:
    age = ctx.check_age(age)
    return ctx.zeta.lookup(age) * ctx.beta.lookup(age)


def q17(ctx: EstimatorContext, age: int) -> float:
    age = ctx.check_age(age)
    q, varpi = ctx.q(age), ctx.varpi.lookup(age)
    if q < varpi:
        raise EstimatorError(
            f"{ctx.sex} age {age}: q_s = {q} below cancer mortality {varpi}; "
            "life table and crude rates are inconsistent"
        )
    return q - varpi


def q11(ctx: EstimatorContext, age: int) -> float:
    stay = 1.0 - q17(ctx, age) - ctx.zeta.lookup(age)
    if not 0.0 <= stay <= 1.0:
        raise EstimatorError(f"{ctx.sex} age {age}: q11 = {stay} not in [0, 1]")
    return stay
