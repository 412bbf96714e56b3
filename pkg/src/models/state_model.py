"""
Multiple state models (S, T) for critical illness covers.

A model is an ordered list of states plus the set of direct transitions
between distinct states. Staying in a state is implicit and never a member
of T. States carry a kind:

- transient: may be occupied for several periods
- reflex: occupied for exactly one period, then left
- absorbing: never left once entered
"""

import json
from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

type StateKind = Literal["transient", "reflex", "absorbing"]
type Transition = tuple[int, int]

STATE_KINDS: tuple[StateKind, ...] = ("transient", "reflex", "absorbing")
MATRIX_ATOL = 1e-12


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class StateDef:
    id: int
    name: str
    kind: StateKind
    description: str = ""

    def __post_init__(self) -> None:
        if self.kind not in STATE_KINDS:
            raise ModelError(f"state {self.id}: invalid kind {self.kind!r}")
        if self.id < 1:
            raise ModelError(f"state ids are labelled 1..N, got {self.id}")


@dataclass(frozen=True)
class Violation:
    subject: str  # "state 3" or "transition (6, 7)"
    rule: str

    def __str__(self) -> str:
        return f"{self.subject}: {self.rule}"


@dataclass(frozen=True)
class MultiStateModel:
    states: tuple[StateDef, ...]
    transitions: frozenset[Transition]
    initial: int = 1
    name: str = ""
    _index: dict[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "_index", {state.id: pos for pos, state in enumerate(self.states)}
        )

    @property
    def size(self) -> int:
        return len(self.states)

    @property
    def ids(self) -> list[int]:
        return [s.id for s in self.states]

    def state(self, state_id: int) -> StateDef:
        try:
            return self.states[self._index[state_id]]
        except KeyError as error:
            raise ModelError(f"unknown state {state_id}") from error

    def index_of(self, state_id: int) -> int:
        """Zero-based matrix position of a state id."""
        self.state(state_id)
        return self._index[state_id]

    def successors(self, state_id: int) -> list[int]:
        return sorted(j for i, j in self.transitions if i == state_id)

    def predecessors(self, state_id: int) -> list[int]:
        return sorted(i for i, j in self.transitions if j == state_id)

    def of_kind(self, kind: StateKind) -> list[int]:
        return [s.id for s in self.states if s.kind == kind]

    def ordered_transitions(self) -> list[Transition]:
        """Transitions sorted by (from, to): the column order of d^{ij} tables."""
        return sorted(self.transitions)

    def reachable(self) -> set[int]:
        seen = {self.initial}
        queue = deque([self.initial])
        while queue:
            for j in self.successors(queue.popleft()):
                if j not in seen:
                    seen.add(j)
                    queue.append(j)
        return seen

    def mask(self) -> np.ndarray:
        """Boolean N x N pattern of entries a transition matrix may fill.

        Off-diagonal entries follow T. The diagonal is open for transient and
        absorbing states and closed for reflex states.
        """
        allowed = np.zeros((self.size, self.size), dtype=bool)
        for i, j in self.transitions:
            allowed[self.index_of(i), self.index_of(j)] = True
        for pos, state in enumerate(self.states):
            allowed[pos, pos] = state.kind != "reflex"
        return allowed

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "initial": self.initial,
            "states": [
                {
                    "id": s.id,
                    "name": s.name,
                    "kind": s.kind,
                    "description": s.description,
                }
                for s in self.states
            ],
            "transitions": [list(t) for t in self.ordered_transitions()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def validate(model: MultiStateModel) -> list[Violation]:
    """Every broken StateDef/MultiStateModel rule; empty means valid."""
    violations: list[Violation] = []
    ids = model.ids
    if len(set(ids)) != len(ids):
        violations.append(Violation("model", "state ids must be unique"))
    known = set(ids)
    for i, j in model.ordered_transitions():
        subject = f"transition ({i}, {j})"
        if i == j:
            violations.append(Violation(subject, "self-loops are implicit, not in T"))
        if i not in known or j not in known:
            violations.append(Violation(subject, "references an unknown state"))
    if model.initial not in known:
        violations.append(Violation(f"state {model.initial}", "initial is unknown"))
        return violations

    for state in model.states:
        subject = f"state {state.id}"
        exits = [j for j in model.successors(state.id) if j != state.id]
        if state.kind == "absorbing" and exits:
            violations.append(
                Violation(subject, f"absorbing state has outgoing transitions {exits}")
            )
        if state.kind != "absorbing" and not exits:
            violations.append(
                Violation(subject, f"{state.kind} state has no outgoing transition")
            )

    reachable = model.reachable()
    violations.extend(
        Violation(f"state {s}", f"unreachable from initial state {model.initial}")
        for s in ids
        if s not in reachable
    )
    if not model.of_kind("absorbing"):
        violations.append(Violation("model", "at least one absorbing state required"))
    return violations


def check_matrix(model: MultiStateModel, matrix: np.ndarray) -> list[Violation]:
    """Check a transition matrix against the model graph.

    Rows must be probability vectors, nonzero entries must follow the mask,
    absorbing rows must be unit self-loops.
    """
    violations: list[Violation] = []
    if matrix.shape != (model.size, model.size):
        return [Violation("matrix", f"shape {matrix.shape} != {model.size}^2")]
    allowed = model.mask()
    for pos, state in enumerate(model.states):
        row = matrix[pos]
        subject = f"row {state.id}"
        if np.any(row < -MATRIX_ATOL) or np.any(row > 1 + MATRIX_ATOL):
            violations.append(Violation(subject, "entries outside [0, 1]"))
        if abs(row.sum() - 1.0) > MATRIX_ATOL:
            violations.append(Violation(subject, f"sums to {row.sum():.15g}"))
        outside = np.flatnonzero((np.abs(row) > 0) & ~allowed[pos])
        if outside.size:
            cols = [model.states[c].id for c in outside]
            violations.append(Violation(subject, f"nonzero outside T at {cols}"))
        if state.kind == "absorbing" and row[pos] != 1.0:
            violations.append(Violation(subject, "absorbing row is not a unit loop"))
    return violations


def build_model(
    states: Iterable[StateDef],
    transitions: Iterable[Transition],
    *,
    initial: int = 1,
    name: str = "",
) -> MultiStateModel:
    """Build a model and reject it unless every invariant holds."""
    model = MultiStateModel(
        states=tuple(states),
        transitions=frozenset((int(i), int(j)) for i, j in transitions),
        initial=initial,
        name=name,
    )
    if violations := validate(model):
        details = "; ".join(str(v) for v in violations)
        raise ModelError(f"invalid model {name!r}: {details}")
    return model


# --- the two constructors ---

HEALTHY = 1
CANCER = 2
METASTATIC = (3, 4, 5, 6)
DEATH_OTHER = 7
DEATH_METASTATIC = 8

CII_TRANSITIONS: frozenset[Transition] = frozenset(
    {
        (1, 2),
        (1, 3),
        (1, 7),
        (2, 3),
        (2, 7),
        (3, 4),
        (3, 8),
        (4, 5),
        (4, 8),
        (5, 6),
        (5, 8),
        # Row 6 goes to state 8: metastatic deaths are state 8.
        (6, 8),
    }
)


def build_cii_model() -> MultiStateModel:
    """The general 8-state model for lung-cancer critical illness cover."""
    states = [
        StateDef(1, "healthy", "transient", "alive, no malignant lung tumour"),
        StateDef(2, "cancer", "transient", "lung cancer without metastases"),
    ]
    states.extend(
        StateDef(
            state_id,
            f"metastatic-{h}",
            "reflex",
            f"lung cancer with distant metastases, e_s < {5 - h}",
        )
        for h, state_id in enumerate(METASTATIC, start=1)
    )
    states += [
        StateDef(7, "dead", "absorbing", "death, healthy or without metastases"),
        StateDef(8, "dead-metastatic", "absorbing", "death with distant metastases"),
    ]
    return build_model(states, CII_TRANSITIONS, name="cii")


CLASSICAL_ACTIVE = 1
CLASSICAL_ILL = 2
CLASSICAL_DEAD_DISEASE = 3
CLASSICAL_DEAD_OTHER = 4


def build_classical_model(acceleration: float) -> MultiStateModel:
    """Four-state dread disease model {a, i, d(D), d(O)}.

    With full acceleration (lambda = 1) the cover ends at diagnosis, so the
    ill state is absorbing.
    """
    if not 0.0 <= acceleration <= 1.0:
        raise ModelError(f"acceleration must be in [0, 1], got {acceleration}")
    ill_absorbing = acceleration == 1.0
    states = [
        StateDef(CLASSICAL_ACTIVE, "a", "transient", "active, healthy"),
        StateDef(
            CLASSICAL_ILL,
            "i",
            "absorbing" if ill_absorbing else "transient",
            "ill with the dread disease",
        ),
        StateDef(CLASSICAL_DEAD_DISEASE, "d(D)", "absorbing", "dead, dread disease"),
        StateDef(CLASSICAL_DEAD_OTHER, "d(O)", "absorbing", "dead, other causes"),
    ]
    transitions = {
        (CLASSICAL_ACTIVE, CLASSICAL_ILL),
        (CLASSICAL_ACTIVE, CLASSICAL_DEAD_DISEASE),
        (CLASSICAL_ACTIVE, CLASSICAL_DEAD_OTHER),
    }
    if not ill_absorbing:
        transitions |= {
            (CLASSICAL_ILL, CLASSICAL_DEAD_DISEASE),
            (CLASSICAL_ILL, CLASSICAL_DEAD_OTHER),
        }
    return build_model(states, transitions, name="classical")
