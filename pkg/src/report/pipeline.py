"""Batch runs: contexts -> rates, projections, simulations, prices -> files.

Each run stages its files in a temporary directory inside the output
directory and moves them into place only once every file is written, so a
failed run leaves no partial outputs. CSV files open with a
``# config-sha256: ...`` line; JSON reports carry the same hash.
"""

import hashlib
import json
import logging
import os
import shutil
import tempfile
from collections.abc import Iterator, Mapping
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import NotRequired, TypedDict

import numpy as np
import pandas as pd

from ..data.tables import Sex
from ..engine import (
    CII_MODEL,
    matrices_frame,
    round_trip_error,
    simulate,
    synthesize_idtable,
    trajectory,
)
from ..estimators import EstimatorContext, rates_frame
from ..models.state_model import CANCER, HEALTHY, METASTATIC
from ..settings import SimulationSettings
from ..valuation import (
    ContractSpec,
    cashflow_schedule,
    epv_benefits,
    net_premium,
    premium_annuity,
    reserve_table,
    viatical_value,
)

logger = logging.getLogger(__name__)

HASH_PREFIX = "# config-sha256: "
LIVING = (HEALTHY, CANCER, *METASTATIC)


def config_hash(config: Mapping) -> str:
    canonical = json.dumps(config, sort_keys=True, default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class Provenance:
    config_sha256: str
    float_format: str = "%.12g"


@contextmanager
def staged_output(out_dir: Path) -> Iterator[Path]:
    """Yield a staging directory whose files replace those in ``out_dir``."""
    out_dir.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=".staging-", dir=out_dir))
    try:
        yield staging
        for path in sorted(staging.iterdir()):
            os.replace(path, out_dir / path.name)
    finally:
        shutil.rmtree(staging, ignore_errors=True)


def write_csv(frame: pd.DataFrame, path: Path, provenance: Provenance) -> Path:
    with path.open("w", encoding="utf-8", newline="") as f:
        f.write(f"{HASH_PREFIX}{provenance.config_sha256}\n")
        frame.to_csv(f, index=False, float_format=provenance.float_format)
    return path


def write_json(doc: dict, path: Path, provenance: Provenance) -> Path:
    doc = {"config_sha256": provenance.config_sha256} | doc
    path.write_text(json.dumps(doc, indent=2, default=_plain) + "\n", encoding="utf-8")
    return path


def _plain(value: object) -> object:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"cannot serialize {type(value).__name__}")


class RatesManifest(TypedDict):
    sexes: list[str]
    ages: list[int]
    rates: str


class ProjectManifestEntry(TypedDict):
    occupancy: str
    matrices: str
    idtable: str
    idtable_rounded: NotRequired[str]
    recurrence_residual: float
    round_trip_error: float


class SimulationManifestEntry(TypedDict):
    frequencies: str
    paths: int
    seed: int
    rng: str
    sup_norm_deviation: float
    absorbing_leaks: int


class PriceReport(TypedDict):
    contract: dict
    epv_benefits: float
    premium_annuity: float
    net_premium: float
    reserves: list[dict]
    cashflows: str
    viatical: NotRequired[list[dict]]


def run_rates(
    contexts: Mapping[Sex, EstimatorContext],
    ages: range,
    out_dir: Path,
    provenance: Provenance,
) -> RatesManifest:
    """All q_ij(s) for every sex and age, one CSV."""
    frame = pd.concat(
        [rates_frame(ctx, ages) for ctx in contexts.values()], ignore_index=True
    )
    with staged_output(out_dir) as staging:
        write_csv(frame, staging / "rates.csv", provenance)
    logger.info("wrote %d rate rows to %s", len(frame), out_dir)
    return {
        "sexes": list(contexts),
        "ages": [ages.start, ages.stop - 1],
        "rates": "rates.csv",
    }


def run_project(  # noqa: PLR0913
    contexts: Mapping[Sex, EstimatorContext],
    entry_age: int,
    term: int,
    out_dir: Path,
    provenance: Provenance,
    *,
    radix: float,
    rounded: bool = False,
) -> dict[str, ProjectManifestEntry]:
    """Occupancy, matrices and the increment-decrement table per sex."""
    manifest: dict[str, ProjectManifestEntry] = {}
    with staged_output(out_dir) as staging:
        for sex, ctx in contexts.items():
            traj = trajectory(ctx, entry_age, term)
            table = synthesize_idtable(ctx, radix, entry_age, entry_age + term)
            entry: ProjectManifestEntry = {
                "occupancy": write_csv(
                    traj.to_frame(), staging / f"occupancy-{sex}.csv", provenance
                ).name,
                "matrices": write_csv(
                    matrices_frame(traj.matrices, entry_age),
                    staging / f"matrices-{sex}.csv",
                    provenance,
                ).name,
                "idtable": write_csv(
                    table.to_frame(), staging / f"idtable-{sex}.csv", provenance
                ).name,
                "recurrence_residual": table.recurrence_residual(),
                "round_trip_error": round_trip_error(table, traj.matrices),
            }
            if rounded:
                entry["idtable_rounded"] = write_csv(
                    table.to_frame(rounded=True),
                    staging / f"idtable-{sex}-rounded.csv",
                    provenance,
                ).name
            manifest[sex] = entry
        write_json({"project": manifest}, staging / "project.json", provenance)
    return manifest


def run_simulate(  # noqa: PLR0913
    contexts: Mapping[Sex, EstimatorContext],
    entry_age: int,
    term: int,
    out_dir: Path,
    provenance: Provenance,
    *,
    simulation: SimulationSettings,
) -> dict[str, SimulationManifestEntry]:
    """Empirical occupancy per sex plus a deviation report."""
    manifest: dict[str, SimulationManifestEntry] = {}
    with staged_output(out_dir) as staging:
        for sex, ctx in contexts.items():
            result, expected = simulate(
                ctx,
                entry_age,
                term,
                simulation.paths,
                simulation.seed,
                rng=simulation.rng,
                chunk_size=simulation.chunk_size,
                workers=simulation.workers,
            )
            path = write_csv(
                result.to_frame(), staging / f"simulation-{sex}.csv", provenance
            )
            manifest[sex] = {
                "frequencies": path.name,
                "paths": result.paths,
                "seed": result.seed,
                "rng": result.rng,
                "sup_norm_deviation": result.deviation(expected),
                "absorbing_leaks": result.absorbing_leaks(),
            }
        write_json({"simulation": manifest}, staging / "deviation.json", provenance)
    return manifest


def run_price(
    ctx: EstimatorContext,
    spec: ContractSpec,
    out_dir: Path,
    provenance: Provenance,
    *,
    purchase_fraction: float | None = None,
) -> PriceReport:
    """EPV, net premium, reserve curve and optional viatical quotes."""
    traj = trajectory(ctx, spec.entry_age, spec.term)
    premium = net_premium(spec, traj)
    reserves = reserve_table(spec, traj, premium)
    report: PriceReport = {
        "contract": spec.to_dict(),
        "epv_benefits": epv_benefits(spec, traj),
        "premium_annuity": premium_annuity(spec, traj),
        "net_premium": premium,
        "reserves": [
            {"k": k, "age": spec.entry_age + k}
            | {f"V{s}": float(reserves[k, CII_MODEL.index_of(s)]) for s in LIVING}
            for k in range(spec.term + 1)
        ],
        "cashflows": "cashflows.csv",
    }
    if purchase_fraction is not None:
        report["viatical"] = [
            {
                "state": quote.state,
                "k": quote.duration,
                "age": spec.entry_age + quote.duration,
                "value": quote.value,
                "price": quote.price,
                "viable": quote.viable,
            }
            for k in range(spec.term)
            for quote in (
                viatical_value(spec, traj, state, k, purchase_fraction, premium)
                for state in METASTATIC
            )
        ]
    with staged_output(out_dir) as staging:
        schedule = cashflow_schedule(spec, traj, premium)
        write_csv(schedule.to_frame(), staging / "cashflows.csv", provenance)
        write_json(dict(report), staging / "price.json", provenance)
    logger.info("priced %s contract: net premium %.6g", spec.sex, premium)
    return report
