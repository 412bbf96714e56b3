"""Tabular inputs: life tables, banded rates and coefficient sets."""

from .loader import (
    load_banded_table,
    load_coefficients,
    load_life_table,
    load_yearly_rates,
)
from .tables import (
    AgeBand,
    BandedRateTable,
    CoefficientSet,
    CoverageError,
    LifeTable,
    Sex,
    TableError,
    YearlyCrudeRates,
    average_crude_rates,
    band_lookup,
)

__all__ = [
    "AgeBand",
    "BandedRateTable",
    "CoefficientSet",
    "CoverageError",
    "LifeTable",
    "Sex",
    "TableError",
    "YearlyCrudeRates",
    "average_crude_rates",
    "band_lookup",
    "load_banded_table",
    "load_coefficients",
    "load_life_table",
    "load_yearly_rates",
]
