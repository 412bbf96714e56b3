"""Everything the transition estimators read, bundled per sex."""

from dataclasses import dataclass

from ..data.datasets import load_dataset
from ..data.tables import BandedRateTable, CoefficientSet, LifeTable, Sex
from ..settings import SUPPORTED_AGES, load_settings


class EstimatorError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class EstimatorContext:
    """Life table, crude rates, metastasis shares and coefficients of one sex.

    Compared and hashed by identity so matrix caches can key on it.
    """

    sex: Sex
    life_table: LifeTable
    zeta: BandedRateTable
    varpi: BandedRateTable
    beta: BandedRateTable
    coeffs: CoefficientSet

    def __post_init__(self) -> None:
        expected = {
            "life_table": None,
            "zeta": "incidence",
            "varpi": "cancer_mortality",
            "beta": "metastasis_share",
        }
        for name, purpose in expected.items():
            table = getattr(self, name)
            if table.sex != self.sex:
                raise EstimatorError(f"{name} is {table.sex}, context is {self.sex}")
            if purpose is not None and table.purpose != purpose:
                raise EstimatorError(f"{name} holds {table.purpose}, not {purpose}")

    def check_age(self, age: int) -> int:
        if age not in SUPPORTED_AGES:
            raise EstimatorError(
                f"age {age} outside supported domain "
                f"{SUPPORTED_AGES.lo}..{SUPPORTED_AGES.hi}"
            )
        return int(age)

    def q(self, age: int) -> float:
        """All-cause one-year death probability from the life table."""
        return self.life_table.q_at(age)


def build_context(
    life_table: LifeTable, dataset: str | None = None
) -> EstimatorContext:
    """Pair a life table with a bundled dataset of the same sex."""
    tables = load_dataset(dataset or load_settings().dataset, life_table.sex)
    return EstimatorContext(
        sex=life_table.sex,
        life_table=life_table,
        zeta=tables.zeta,
        varpi=tables.varpi,
        beta=tables.beta,
        coeffs=tables.coeffs,
    )
