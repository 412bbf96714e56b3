"""Shared pytest fixtures: synthetic life tables and estimator contexts.

National life tables are not bundled, so a Gompertz law stands in for them.
Its q stays below 1 up to age 100, which keeps every matrix well defined.
"""

import math
from pathlib import Path

import numpy as np
import pytest

from src.data.tables import LifeTable
from src.estimators import build_context

PROJECT_ROOT = Path(__file__).resolve().parent.parent

GOMPERTZ_B = 5e-5
GOMPERTZ_C = 1.1


def gompertz_q(
    ages: np.ndarray, b: float = GOMPERTZ_B, c: float = GOMPERTZ_C
) -> np.ndarray:
    return 1.0 - np.exp(-b * c**ages * (c - 1.0) / math.log(c))


def gompertz_table(sex: str, first_age: int = 0, last_age: int = 100) -> LifeTable:
    ages = np.arange(first_age, last_age + 1)
    return LifeTable.from_q(sex, first_age, gompertz_q(ages))


@pytest.fixture(scope="session")
def male_table() -> LifeTable:
    return gompertz_table("male")


@pytest.fixture(scope="session")
def female_table() -> LifeTable:
    return gompertz_table("female")


@pytest.fixture(scope="session")
def male_ctx(male_table):
    return build_context(male_table)


@pytest.fixture(scope="session")
def female_ctx(female_table):
    return build_context(female_table)


@pytest.fixture(scope="session", params=["male", "female"])
def ctx(request, male_ctx, female_ctx):
    return male_ctx if request.param == "male" else female_ctx


@pytest.fixture
def life_table_csv(tmp_path, male_table, female_table):
    """Both fixture tables written as age,l,d,q CSV files."""
    paths = {}
    for table in (male_table, female_table):
        path = tmp_path / f"life-{table.sex}.csv"
        table.to_frame().to_csv(path, index=False, float_format="%.17g")
        paths[table.sex] = path
    return paths
