"""Command-line interface: rates / project / simulate / price / model."""

import argparse
import hashlib
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from types import SimpleNamespace

import yaml

from .data.loader import load_life_table
from .data.tables import SEXES, Sex
from .estimators import EstimatorContext, build_context
from .models.state_model import build_cii_model, build_classical_model
from .report.pipeline import (
    Provenance,
    config_hash,
    run_price,
    run_project,
    run_rates,
    run_simulate,
)
from .settings import Settings, deep_merge, load_settings
from .valuation import load_contract

PROJECT_ROOT = Path(__file__).resolve().parent.parent
DEFAULT_OUT = PROJECT_ROOT / "output"

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    settings: Settings
    sexes: tuple[Sex, ...]
    life_tables: dict[str, Path]
    out: Path
    entry_age: int | None = None
    term: int | None = None
    contract: dict | None = None
    options: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for sex in self.sexes:
            path = self.life_tables.get(sex)
            if path is None:
                raise ValueError(f"no {sex} life table given (--life-table {sex}=PATH)")
            if not path.exists():
                raise FileNotFoundError(f"life table not found: {path}")
        ages = self.settings.ages
        if self.entry_age is not None and self.term is not None:
            if self.term < 0:
                raise ValueError(f"term must be nonnegative, got {self.term}")
            if self.entry_age < ages.lo or self.entry_age + self.term > ages.hi:
                raise ValueError(
                    f"ages {self.entry_age}..{self.entry_age + self.term} "
                    f"outside {ages.lo}..{ages.hi}"
                )

    @property
    def provenance(self) -> Provenance:
        """Hash of everything that shapes the outputs, life-table contents included."""
        run = {
            "settings": self.settings.raw,
            "sexes": list(self.sexes),
            "life_tables": {sex: _digest(self.life_tables[sex]) for sex in self.sexes},
            "entry_age": self.entry_age,
            "term": self.term,
            "contract": self.contract,
            "options": self.options,
        }
        return Provenance(config_hash(run), self.settings.float_format)

    def contexts(self) -> dict[Sex, EstimatorContext]:
        return {
            sex: build_context(
                load_life_table(self.life_tables[sex], sex, self.settings.radix),
                self.settings.dataset,
            )
            for sex in self.sexes
        }


def _digest(path: Path) -> str:
    with path.open("rb") as f:
        return hashlib.file_digest(f, "sha256").hexdigest()


def _parse_life_tables(values: list[str] | None, sexes: tuple[Sex, ...]) -> dict:
    """``SEX=PATH`` pairs; a bare PATH is allowed when only one sex runs."""
    tables: dict[str, Path] = {}
    for value in values or []:
        sex, sep, path = value.partition("=")
        if sep:
            if sex not in SEXES:
                raise ValueError(f"unknown sex {sex!r} in --life-table {value}")
            tables[sex] = Path(path)
        elif len(sexes) == 1:
            tables[sexes[0]] = Path(value)
        else:
            raise ValueError("with --sex both, give --life-table SEX=PATH twice")
    return tables


def _load_overlay(path: Path | None) -> dict:
    if path is None:
        return {}
    if not path.exists():
        raise FileNotFoundError(f"config not found: {path}")
    with path.open(encoding="utf-8") as f:
        overlay = yaml.safe_load(f) or {}
    if not isinstance(overlay, dict):
        raise ValueError(f"{path}: config must be a mapping")
    return overlay


def build_run_config(
    args: argparse.Namespace | SimpleNamespace,
    *,
    sexes: tuple[Sex, ...] | None = None,
    contract: dict | None = None,
) -> RunConfig:
    """Settings overlaid by --config, then by explicit flags."""
    overlay = _load_overlay(getattr(args, "config", None))
    if getattr(args, "dataset", None):
        overlay["dataset"] = args.dataset
    simulation = {
        key: getattr(args, key)
        for key in ("paths", "seed", "rng", "workers")
        if getattr(args, key, None) is not None
    }
    if simulation:
        overlay = deep_merge(overlay, {"simulation": simulation})
    settings = Settings(raw=deep_merge(load_settings().raw, overlay))

    if sexes is None:
        chosen = getattr(args, "sex", None) or settings.raw.get("sex", "both")
        sexes = SEXES if chosen == "both" else (chosen,)
    life_tables = {
        sex: Path(path) for sex, path in settings.raw.get("life_tables", {}).items()
    }
    life_tables |= _parse_life_tables(getattr(args, "life_tables", None), sexes)
    return RunConfig(
        settings=settings,
        sexes=sexes,
        life_tables=life_tables,
        out=args.out or DEFAULT_OUT / args.command,
        entry_age=getattr(args, "age", None),
        term=getattr(args, "term", None),
        contract=contract,
        options={
            key: getattr(args, key)
            for key in ("rounded", "viatical")
            if getattr(args, key, None) is not None
        },
    )


def cmd_rates(args: argparse.Namespace | SimpleNamespace) -> int:
    config = build_run_config(args)
    manifest = run_rates(
        config.contexts(), config.settings.ages.ages, config.out, config.provenance
    )
    print(f"rates for {', '.join(manifest['sexes'])}: {config.out / manifest['rates']}")
    return 0


def cmd_project(args: argparse.Namespace | SimpleNamespace) -> int:
    config = build_run_config(args)
    manifest = run_project(
        config.contexts(),
        config.entry_age,
        config.term,
        config.out,
        config.provenance,
        radix=config.settings.radix,
        rounded=args.rounded,
    )
    for sex, entry in manifest.items():
        print(
            f"{sex}: {entry['occupancy']}, {entry['idtable']} "
            f"(round trip {entry['round_trip_error']:.2e})"
        )
    print(f"output: {config.out}")
    return 0


def cmd_simulate(args: argparse.Namespace | SimpleNamespace) -> int:
    config = build_run_config(args)
    manifest = run_simulate(
        config.contexts(),
        config.entry_age,
        config.term,
        config.out,
        config.provenance,
        simulation=config.settings.simulation,
    )
    for sex, entry in manifest.items():
        print(
            f"{sex}: {entry['paths']} paths, sup-norm deviation "
            f"{entry['sup_norm_deviation']:.4g}, leaks {entry['absorbing_leaks']}"
        )
    print(f"output: {config.out}")
    return 0


def cmd_price(args: argparse.Namespace | SimpleNamespace) -> int:
    spec = load_contract(args.contract)
    config = build_run_config(args, sexes=(spec.sex,), contract=spec.to_dict())
    report = run_price(
        config.contexts()[spec.sex],
        spec,
        config.out,
        config.provenance,
        purchase_fraction=args.viatical,
    )
    print(f"EPV benefits {report['epv_benefits']:.6f}")
    print(f"{spec.premium_mode} net premium {report['net_premium']:.6f}")
    print(f"output: {config.out}")
    return 0


def cmd_model(args: argparse.Namespace | SimpleNamespace) -> int:
    if args.kind == "classical":
        model = build_classical_model(args.acceleration)
    else:
        model = build_cii_model()
    print(model.to_json())
    return 0


def _add_common_args(p: argparse.ArgumentParser, *, with_sex: bool = True) -> None:
    p.add_argument("--config", type=Path, help="YAML overlay onto settings.json")
    if with_sex:
        p.add_argument("--sex", choices=[*SEXES, "both"], default=None)
    p.add_argument(
        "--life-table",
        action="append",
        dest="life_tables",
        metavar="[SEX=]PATH",
        help="life table CSV (age,l,d or age,q); repeat per sex",
    )
    p.add_argument("--dataset", help="bundled dataset under datasets/")
    p.add_argument(
        "--out", type=Path, default=None, help="output dir (default: output/<command>)"
    )


def _add_horizon_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--age", type=int, default=20, help="entry age x")
    p.add_argument("--term", type=int, default=20, help="projection years n")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="cii-multistate")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True)

    p_rates = sub.add_parser("rates", help="transition probabilities by age")
    _add_common_args(p_rates)
    p_rates.set_defaults(fn=cmd_rates)

    p_project = sub.add_parser("project", help="occupancy + increment-decrement table")
    _add_common_args(p_project)
    _add_horizon_args(p_project)
    p_project.add_argument(
        "--rounded", action="store_true", help="also export whole-life counts"
    )
    p_project.set_defaults(fn=cmd_project)

    p_sim = sub.add_parser("simulate", help="Monte Carlo check of the projection")
    _add_common_args(p_sim)
    _add_horizon_args(p_sim)
    p_sim.add_argument("--paths", type=int, default=None)
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.add_argument("--rng", default=None, help="numpy bit generator name")
    p_sim.add_argument("--workers", type=int, default=None)
    p_sim.set_defaults(fn=cmd_simulate)

    p_price = sub.add_parser("price", help="EPV, net premium, reserves")
    _add_common_args(p_price, with_sex=False)
    p_price.add_argument("--contract", type=Path, required=True, help="contract JSON")
    p_price.add_argument(
        "--viatical",
        type=float,
        default=None,
        metavar="FRACTION",
        help="also quote viatical prices at this purchase fraction",
    )
    p_price.set_defaults(fn=cmd_price)

    p_model = sub.add_parser("model", help="print a state model as JSON")
    p_model.add_argument("--kind", choices=["cii", "classical"], default="cii")
    p_model.add_argument("--acceleration", type=float, default=0.0)
    p_model.set_defaults(fn=cmd_model)

    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.fn(args)
    except (ValueError, FileNotFoundError, yaml.YAMLError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
