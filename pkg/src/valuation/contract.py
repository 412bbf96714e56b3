"""Contract terms of a critical illness cover and their JSON form.

Benefit semantics:

- entry into state 3 pays ``c * lambda``, plus ``c_ad`` when lambda is 0
  (lump-sum design only)
- death from states 1 or 2 pays ``c``; death from a metastatic state pays
  ``c * (1 - lambda)``, what is left after the acceleration
- the annuity design pays ``b_j`` for each year begun in metastatic state j
- an optional early diagnosis benefit is paid on the move 1 -> 2

Premiums fall due at the start of each year spent in a premium-paying state;
benefits are paid at the end of the year.
"""

import json
from collections.abc import Mapping
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Literal

from ..data.tables import Sex, check_sex
from ..models.state_model import CII_TRANSITIONS, METASTATIC
from ..settings import SUPPORTED_AGES

type Design = Literal["lump_sum", "annuity"]
type PremiumMode = Literal["single", "level"]

DESIGNS: tuple[Design, ...] = ("lump_sum", "annuity")
PREMIUM_MODES: tuple[PremiumMode, ...] = ("single", "level")
PAYING_STATES = frozenset({i for i, _ in CII_TRANSITIONS})


class ValuationError(ValueError):
    pass


@dataclass(frozen=True)
class ContractSpec:
    sex: Sex
    entry_age: int
    term: int
    death_benefit: float
    disease_benefit: float = 0.0
    acceleration: float = 0.0
    design: Design = "lump_sum"
    annuity_rates: Mapping[int, float] = field(default_factory=dict)
    discount_factor: float = 1.0
    premium_mode: PremiumMode = "level"
    premium_states: tuple[int, ...] = (1, 2)
    early_diagnosis_benefit: float = 0.0

    def __post_init__(self) -> None:
        check_sex(self.sex)
        object.__setattr__(
            self,
            "annuity_rates",
            {int(j): float(b) for j, b in self.annuity_rates.items()},
        )
        object.__setattr__(
            self, "premium_states", tuple(int(i) for i in self.premium_states)
        )
        if self.term < 1:
            raise ValuationError(f"term must be at least one year, got {self.term}")
        if (
            self.entry_age < SUPPORTED_AGES.lo
            or self.entry_age + self.term > SUPPORTED_AGES.hi
        ):
            raise ValuationError(
                f"cover {self.entry_age}..{self.entry_age + self.term} leaves "
                f"the supported ages {SUPPORTED_AGES.lo}..{SUPPORTED_AGES.hi}"
            )
        if not 0.0 <= self.acceleration <= 1.0:
            raise ValuationError(f"acceleration {self.acceleration} not in [0, 1]")
        if not 0.0 < self.discount_factor <= 1.0:
            raise ValuationError(
                f"discount factor {self.discount_factor} not in (0, 1]"
            )
        amounts = {
            "death_benefit": self.death_benefit,
            "disease_benefit": self.disease_benefit,
            "early_diagnosis_benefit": self.early_diagnosis_benefit,
        } | {f"annuity_rates[{j}]": b for j, b in self.annuity_rates.items()}
        for name, amount in amounts.items():
            if amount < 0:
                raise ValuationError(f"{name} must be nonnegative, got {amount}")
        if self.design not in DESIGNS:
            raise ValuationError(f"unknown design {self.design!r}; options: {DESIGNS}")
        if self.premium_mode not in PREMIUM_MODES:
            raise ValuationError(f"unknown premium mode {self.premium_mode!r}")
        self._check_design()
        if not self.premium_states or not set(self.premium_states) <= PAYING_STATES:
            raise ValuationError(
                f"premium states {self.premium_states} must be living states"
            )

    def _check_design(self) -> None:
        if self.design == "lump_sum" and self.annuity_rates:
            raise ValuationError("annuity rates given for a lump-sum design")
        if self.design == "annuity":
            if self.disease_benefit:
                raise ValuationError("the annuity design replaces the disease lump sum")
            if unknown := set(self.annuity_rates) - set(METASTATIC):
                raise ValuationError(
                    f"annuity rates for non-metastatic {sorted(unknown)}"
                )

    @property
    def disease_payment(self) -> float:
        """Amount paid on entry into state 3."""
        payment = self.death_benefit * self.acceleration
        if self.design == "lump_sum" and self.acceleration == 0.0:
            payment += self.disease_benefit
        return payment

    @property
    def metastatic_death_payment(self) -> float:
        return self.death_benefit * (1.0 - self.acceleration)

    def annuity_rate(self, state: int) -> float:
        return self.annuity_rates.get(state, 0.0)

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["annuity_rates"] = {str(j): b for j, b in self.annuity_rates.items()}
        doc["premium_states"] = list(self.premium_states)
        return doc


def load_contract(path: Path | str) -> ContractSpec:
    """Read a ContractSpec from a JSON document with the same field names."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"contract not found: {path}")
    with path.open(encoding="utf-8") as f:
        doc = json.load(f)
    known = set(ContractSpec.__dataclass_fields__)
    if unknown := set(doc) - known:
        raise ValuationError(f"{path}: unknown contract fields {sorted(unknown)}")
    try:
        return ContractSpec(**doc)
    except TypeError as error:
        raise ValuationError(f"{path}: {error}") from error
