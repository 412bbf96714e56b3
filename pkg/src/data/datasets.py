"""Dataset resolution: locate bundled rate tables and coefficient sets.

A dataset is a directory under ``datasets/`` holding ``coefficients.json``
(required) and one sub-directory per sex with ``incidence.csv``,
``cancer_mortality.csv`` and ``metastasis_share.csv``. The root can be moved
with the ``CII_DATA_DIR`` environment variable.
"""

import os
from dataclasses import dataclass
from pathlib import Path

from .loader import load_banded_table, load_coefficients
from .tables import BandedRateTable, CoefficientSet, Sex, check_sex

PROJECT_ROOT = Path(__file__).resolve().parent.parent.parent
DATA_DIR_ENV = "CII_DATA_DIR"
COEFFICIENTS_FILE = "coefficients.json"


def datasets_dir() -> Path:
    if override := os.environ.get(DATA_DIR_ENV):
        return Path(override)
    return PROJECT_ROOT / "datasets"


def available_datasets() -> list[str]:
    """Sorted names of dataset directories that contain coefficients.json."""
    root = datasets_dir()
    if not root.is_dir():
        return []
    return sorted(p.name for p in root.iterdir() if (p / COEFFICIENTS_FILE).is_file())


def _validate_dataset_name(name: str) -> None:
    """Reject names that do not exactly identify a registered dataset.

    Exact membership of the discovered names is what blocks absolute paths
    and ``..`` traversal.
    """
    datasets = available_datasets()
    if name not in datasets:
        message = f"unknown dataset {name!r}; available: {', '.join(datasets)}"
        raise ValueError(message)


def dataset_path(name: str) -> Path:
    _validate_dataset_name(name)
    return datasets_dir() / name


@dataclass(frozen=True)
class DatasetTables:
    zeta: BandedRateTable
    varpi: BandedRateTable
    beta: BandedRateTable
    coeffs: CoefficientSet


def load_dataset(name: str, sex: Sex) -> DatasetTables:
    """Incidence, cancer mortality and metastasis shares for one sex."""
    sex = check_sex(sex)
    root = dataset_path(name)
    tables = root / sex
    return DatasetTables(
        zeta=load_banded_table(tables / "incidence.csv", sex, "incidence"),
        varpi=load_banded_table(
            tables / "cancer_mortality.csv", sex, "cancer_mortality"
        ),
        beta=load_banded_table(
            tables / "metastasis_share.csv", sex, "metastasis_share"
        ),
        coeffs=load_coefficients(root / COEFFICIENTS_FILE),
    )
