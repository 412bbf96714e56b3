"""Transition-probability estimators of the lung-cancer model."""

from .active import q11, q12, q13, q17
from .context import EstimatorContext, EstimatorError, build_context
from .metastasis import q2_row, varrho, varrho_segment_jump
from .rates import RATE_KEYS, rates_frame, transition_probabilities
from .terminal import (
    TerminalDeathProbs,
    first_year_death_gap,
    survival_pmf,
    terminal_probs,
    terminal_probs_female,
    terminal_probs_male,
)

__all__ = [
    "RATE_KEYS",
    "EstimatorContext",
    "EstimatorError",
    "TerminalDeathProbs",
    "build_context",
    "first_year_death_gap",
    "q2_row",
    "q11",
    "q12",
    "q13",
    "q17",
    "rates_frame",
    "survival_pmf",
    "terminal_probs",
    "terminal_probs_female",
    "terminal_probs_male",
    "transition_probabilities",
    "varrho",
    "varrho_segment_jump",
]
