"""
CSV/JSON ingestion for every tabular input of the model.

This module handles:
- Life tables given as ``age,l,d`` or ``age,q`` (q-only tables are expanded
  from a radix)
- Banded rate tables ``age_lo,age_hi,value`` (per 100000 for crude rates,
  fractions for metastasis shares)
- Yearly crude-rate tables ``year,age_lo,age_hi,value`` for averaging
- Regression coefficient sets stored as JSON
"""

import json
import logging
from pathlib import Path
from typing import TextIO

import pandas as pd

from .tables import (
    PER_POPULATION,
    AgeBand,
    BandedRateTable,
    CoefficientSet,
    LifeTable,
    RatePurpose,
    Sex,
    TableError,
    YearlyCrudeRates,
    check_sex,
)

logger = logging.getLogger(__name__)

type Source = Path | str | TextIO

DEFAULT_RADIX = 100_000.0


def _read_csv(source: Source, required: set[str]) -> pd.DataFrame:
    """Read a headed UTF-8 CSV, ignoring ``#`` provenance comments."""
    if isinstance(source, str | Path) and not Path(source).exists():
        raise FileNotFoundError(f"table not found: {source}")
    try:
        frame = pd.read_csv(source, comment="#", encoding="utf-8")
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as error:
        raise TableError(f"unreadable table {source}: {error}") from error
    frame.columns = [str(c).strip().lower() for c in frame.columns]
    if missing := required - set(frame.columns):
        raise TableError(f"table {source} lacks columns {sorted(missing)}")
    if frame[sorted(required)].isna().any().any():
        raise TableError(f"table {source} has empty cells")
    return frame


def load_life_table(
    source: Source, sex: Sex, radix: float = DEFAULT_RADIX
) -> LifeTable:
    """
    Load a single-sex life table.

    Args:
        source: CSV path or text stream with ``age,l,d`` and/or ``age,q``
        sex: the table's sex
        radix: starting cohort when only q is given

    Returns:
        A validated LifeTable

    Raises:
        TableError: non-contiguous ages, q outside [0, 1], d > l, l increasing

    """
    sex = check_sex(sex)
    frame = _read_csv(source, {"age"})
    columns = set(frame.columns)
    has_counts = {"l", "d"} <= columns
    if not has_counts and "q" not in columns:
        raise TableError("life table needs columns age,l,d or age,q")
    if frame.empty:
        raise TableError(f"life table {source} has no rows")
    frame = frame.sort_values("age")
    ages = frame["age"].astype(int).tolist()
    if ages != list(range(ages[0], ages[0] + len(ages))):
        raise TableError(f"life table ages are not contiguous: {ages[:3]}...")

    if has_counts:
        lives = frame["l"].to_numpy(dtype=float)
        deaths = frame["d"].to_numpy(dtype=float)
        if (deaths > lives).any():
            bad = ages[int((deaths > lives).argmax())]
            raise TableError(f"d_{bad} exceeds l_{bad}")
        alive = lives > 0
        q = deaths.copy()
        q[alive] = deaths[alive] / lives[alive]
        q[~alive] = 1.0
        if "q" in columns:
            given = frame["q"].to_numpy(dtype=float)
            return LifeTable(sex, ages[0], lives, deaths, given)
        return LifeTable(sex, ages[0], lives, deaths, q)

    q = frame["q"].to_numpy(dtype=float)
    if ((q < 0) | (q > 1)).any():
        bad = ages[int(((q < 0) | (q > 1)).argmax())]
        raise TableError(f"q_{bad} not in [0, 1]")
    logger.debug("expanding q-only %s life table from radix %s", sex, radix)
    return LifeTable.from_q(sex, ages[0], q, radix)


def _bands(frame: pd.DataFrame) -> list[AgeBand]:
    return [
        AgeBand(int(lo), int(hi))
        for lo, hi in zip(frame["age_lo"], frame["age_hi"], strict=True)
    ]


def load_banded_table(
    source: Source, sex: Sex, purpose: RatePurpose
) -> BandedRateTable:
    """Load ``age_lo,age_hi,value`` rows; crude rates are rescaled per person."""
    sex = check_sex(sex)
    if purpose not in PER_POPULATION:
        raise TableError(f"unknown rate purpose {purpose!r}")
    frame = _read_csv(source, {"age_lo", "age_hi", "value"}).sort_values("age_lo")
    scale = PER_POPULATION[purpose]
    values = (frame["value"].astype(float) / scale).tolist()
    return BandedRateTable(sex, purpose, tuple(zip(_bands(frame), values, strict=True)))


def load_yearly_rates(
    source: Source, sex: Sex, purpose: RatePurpose
) -> list[YearlyCrudeRates]:
    """Load long-format ``year,age_lo,age_hi,value`` rows, one table per year."""
    sex = check_sex(sex)
    frame = _read_csv(source, {"year", "age_lo", "age_hi", "value"})
    tables = []
    for year, rows in frame.sort_values(["year", "age_lo"]).groupby("year"):
        values = rows["value"].astype(float).tolist()
        tables.append(
            YearlyCrudeRates(
                sex,
                purpose,
                int(year),
                tuple(zip(_bands(rows), values, strict=True)),
            )
        )
    return tables


def load_coefficients(path: Path | str) -> CoefficientSet:
    """Load a coefficient JSON document keyed by coefficient name."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"coefficient file not found: {path}")
    with path.open(encoding="utf-8") as f:
        doc = json.load(f)
    coefficients = doc.get("coefficients", {})
    if missing := set(CoefficientSet.names()) - set(coefficients):
        raise TableError(f"{path} lacks coefficients {sorted(missing)}")
    empirical = {
        sex: tuple(float(p) for p in dist)
        for sex, dist in doc.get("empirical_survival", {}).items()
    }
    return CoefficientSet(
        **{name: float(coefficients[name]) for name in CoefficientSet.names()},
        note=doc.get("note", ""),
        goodness_of_fit=doc.get("goodness_of_fit", {}),
        empirical_survival=empirical,
    )
