"""Validated tabular inputs: life tables, banded rates, regression coefficients.

All containers are frozen after construction and validate their invariants
in ``__post_init__``, so any instance that exists is consistent.
"""

import bisect
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import pandas as pd

type Sex = Literal["male", "female"]
type RatePurpose = Literal[
    "incidence", "cancer_mortality", "metastasis_share", "metastasis_year"
]

SEXES: tuple[Sex, ...] = ("male", "female")
RATE_PURPOSES: tuple[RatePurpose, ...] = (
    "incidence",
    "cancer_mortality",
    "metastasis_share",
    "metastasis_year",
)
# Crude rates are published per 100000 inhabitants.
PER_POPULATION: dict[RatePurpose, float] = {
    "incidence": 100_000.0,
    "cancer_mortality": 100_000.0,
    "metastasis_share": 1.0,
    "metastasis_year": 1.0,
}
CRUDE_RATE_CEILING = 0.05
Q_TOLERANCE = 1e-9
COUNT_TOLERANCE = 0.5  # published l/d columns are rounded to whole lives


class TableError(ValueError):
    pass


class CoverageError(TableError):
    pass


def check_sex(sex: str) -> Sex:
    if sex not in SEXES:
        raise TableError(f"unknown sex {sex!r}; options: {list(SEXES)}")
    return sex  # type: ignore[return-value]


def _readonly(values: np.ndarray) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class LifeTable:
    sex: Sex
    first_age: int
    lives: np.ndarray
    deaths: np.ndarray
    q: np.ndarray

    def __post_init__(self) -> None:
        check_sex(self.sex)
        for name in ("lives", "deaths", "q"):
            object.__setattr__(self, name, _readonly(getattr(self, name)))
        n = len(self.q)
        if n == 0 or len(self.lives) != n or len(self.deaths) != n:
            raise TableError("life table columns must be non-empty and equal length")
        if np.any((self.q < 0) | (self.q > 1)):
            bad = self.first_age + int(np.flatnonzero((self.q < 0) | (self.q > 1))[0])
            raise TableError(f"q_{bad} = {self.q[bad - self.first_age]} not in [0, 1]")
        if np.any(self.lives < 0) or np.any(self.deaths < 0):
            raise TableError("life table counts must be nonnegative")
        if np.any(self.deaths > self.lives):
            bad = self.first_age + int(np.flatnonzero(self.deaths > self.lives)[0])
            raise TableError(f"d_{bad} exceeds l_{bad}")
        if np.any(np.diff(self.lives) > 0):
            bad = self.first_age + int(np.flatnonzero(np.diff(self.lives) > 0)[0]) + 1
            raise TableError(f"l increases with age at {bad}")
        alive = self.lives > 0
        ratio = np.divide(self.deaths, self.lives, out=np.ones(n), where=alive)
        if np.any(np.abs(ratio - self.q)[alive] > Q_TOLERANCE):
            raise TableError("q_s must equal d_s / l_s wherever l_s > 0")
        gap = np.abs(self.lives[1:] - (self.lives[:-1] - self.deaths[:-1]))
        if np.any(gap > COUNT_TOLERANCE):
            bad = self.first_age + int(np.flatnonzero(gap > COUNT_TOLERANCE)[0])
            raise TableError(f"l_{bad + 1} != l_{bad} - d_{bad}")

    @classmethod
    def from_q(
        cls,
        sex: Sex,
        first_age: int,
        q: np.ndarray | list[float],
        radix: float = 100_000.0,
    ) -> "LifeTable":
        """Synthesize l and d from q starting at ``radix`` lives."""
        q = np.asarray(q, dtype=float)
        survival = np.concatenate(([1.0], np.cumprod(1.0 - q)[:-1]))
        lives = radix * survival
        return cls(sex, first_age, lives, lives * q, q)

    @property
    def last_age(self) -> int:
        return self.first_age + len(self.q) - 1

    @property
    def ages(self) -> range:
        return range(self.first_age, self.last_age + 1)

    def q_at(self, age: int) -> float:
        if not self.first_age <= age <= self.last_age:
            raise CoverageError(
                f"age {age} outside life table {self.first_age}..{self.last_age}"
            )
        return float(self.q[age - self.first_age])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {"age": list(self.ages), "l": self.lives, "d": self.deaths, "q": self.q}
        )


@dataclass(frozen=True, order=True)
class AgeBand:
    lo: int
    hi: int

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise TableError(f"age band {self.lo}-{self.hi} is empty")

    def __contains__(self, age: int) -> bool:
        return self.lo <= age <= self.hi

    @property
    def label(self) -> str:
        return f"{self.lo}-{self.hi}"


@dataclass(frozen=True)
class BandedRateTable:
    sex: Sex
    purpose: RatePurpose
    bands: tuple[tuple[AgeBand, float], ...]
    _starts: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        check_sex(self.sex)
        if self.purpose not in RATE_PURPOSES:
            raise TableError(f"unknown rate purpose {self.purpose!r}")
        if not self.bands:
            raise TableError(f"{self.sex} {self.purpose} table has no bands")
        bands = [band for band, _ in self.bands]
        for prev, nxt in zip(bands, bands[1:], strict=False):
            if nxt.lo != prev.hi + 1:
                raise TableError(
                    f"bands {prev.label} and {nxt.label} overlap or leave a gap"
                )
        for band, value in self.bands:
            if not 0.0 <= value <= 1.0:
                raise TableError(f"{self.purpose} {band.label}: {value} not in [0, 1]")
            if PER_POPULATION[self.purpose] > 1 and value >= CRUDE_RATE_CEILING:
                raise TableError(
                    f"{self.purpose} {band.label}: {value} implausible "
                    f"(>= {CRUDE_RATE_CEILING} per person-year)"
                )
        object.__setattr__(self, "_starts", tuple(b.lo for b in bands))

    @property
    def coverage(self) -> AgeBand:
        return AgeBand(self.bands[0][0].lo, self.bands[-1][0].hi)

    def lookup(self, age: int) -> float:
        if age not in self.coverage:
            raise CoverageError(
                f"age {age} outside {self.sex} {self.purpose} coverage "
                f"{self.coverage.label}"
            )
        pos = bisect.bisect_right(self._starts, age) - 1
        return self.bands[pos][1]

    def to_frame(self) -> pd.DataFrame:
        scale = PER_POPULATION[self.purpose]
        return pd.DataFrame(
            [(band.lo, band.hi, value * scale) for band, value in self.bands],
            columns=["age_lo", "age_hi", "value"],
        )


def band_lookup(table: BandedRateTable, age: int) -> float:
    """Step-function value of the band containing ``age``."""
    return table.lookup(age)


@dataclass(frozen=True)
class YearlyCrudeRates:
    """One calendar year of crude rates, still per 100000 population."""

    sex: Sex
    purpose: RatePurpose
    year: int
    bands: tuple[tuple[AgeBand, float], ...]

    def __post_init__(self) -> None:
        check_sex(self.sex)
        if any(value < 0 for _, value in self.bands):
            raise TableError(f"{self.year}: crude rates must be nonnegative")


def average_crude_rates(per_year: list[YearlyCrudeRates]) -> BandedRateTable:
    """Per-band arithmetic mean over the years, rescaled to per-person rates."""
    if not per_year:
        raise TableError("no yearly tables to average")
    first = per_year[0]
    layout = [band for band, _ in first.bands]
    for table in per_year[1:]:
        if (table.sex, table.purpose) != (first.sex, first.purpose):
            raise TableError("yearly tables mix sexes or purposes")
        if [band for band, _ in table.bands] != layout:
            raise TableError(f"year {table.year} bands differ from year {first.year}")
    values = np.array([[value for _, value in t.bands] for t in per_year])
    means = values.mean(axis=0) / PER_POPULATION[first.purpose]
    return BandedRateTable(
        first.sex,
        first.purpose,
        tuple(zip(layout, (float(m) for m in means), strict=True)),
    )


@dataclass(frozen=True)
class CoefficientSet:
    female_varrho_slope: float
    male_varrho_young_const: float
    male_varrho_young_slope: float
    male_varrho_old_const: float
    male_varrho_old_slope: float
    male_terminal_const3: float
    male_terminal_slope: float
    male_terminal_w0: float
    male_terminal_w1: float
    female_terminal_const: float
    female_terminal_slope: float
    note: str = ""
    # Fit statistics and cohort distributions are kept as metadata only.
    goodness_of_fit: Mapping = field(default_factory=dict, compare=False)
    empirical_survival: Mapping[str, tuple[float, ...]] = field(
        default_factory=dict, compare=False
    )

    def __post_init__(self) -> None:
        for name, value in self.values().items():
            if not math.isfinite(value):
                raise TableError(f"coefficient {name} is not finite")
        if abs(self.male_terminal_w0 + self.male_terminal_w1 - 1.0) > Q_TOLERANCE:
            raise TableError("male terminal weights w0 + w1 must equal 1")

    @classmethod
    def names(cls) -> list[str]:
        return [
            f
            for f in cls.__dataclass_fields__
            if f not in {"note", "goodness_of_fit", "empirical_survival"}
        ]

    def values(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in self.names()}
