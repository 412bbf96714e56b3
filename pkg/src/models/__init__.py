"""Multiple state models package."""

from .state_model import (
    ModelError,
    MultiStateModel,
    StateDef,
    Violation,
    build_classical_model,
    build_cii_model,
    build_model,
    check_matrix,
    validate,
)

__all__ = [
    "ModelError",
    "MultiStateModel",
    "StateDef",
    "Violation",
    "build_cii_model",
    "build_classical_model",
    "build_model",
    "check_matrix",
    "validate",
]
