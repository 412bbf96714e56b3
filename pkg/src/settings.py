"""Load settings.json into typed, frozen structures.

Every tunable default (age domain, output precision, radix, simulation
parameters) lives in settings.json; a run configuration overlays it.
"""

import json
from dataclasses import dataclass
from functools import cache
from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parent.parent
SETTINGS_PATH = PROJECT_ROOT / "settings.json"


@dataclass(frozen=True)
class AgeDomain:
    lo: int
    hi: int

    def __contains__(self, age: int) -> bool:
        return self.lo <= age <= self.hi

    @property
    def ages(self) -> range:
        return range(self.lo, self.hi + 1)


@dataclass(frozen=True)
class SimulationSettings:
    paths: int
    seed: int
    rng: str
    chunk_size: int
    workers: int

    def __post_init__(self) -> None:
        if self.paths < 1:
            raise ValueError(f"simulation needs at least one path, got {self.paths}")
        if self.chunk_size < 1 or self.workers < 1:
            raise ValueError("simulation chunk_size and workers must be positive")


@dataclass(frozen=True)
class Settings:
    raw: dict

    @property
    def ages(self) -> AgeDomain:
        a = self.raw["ages"]
        return AgeDomain(a["min"], a["max"])

    @property
    def dataset(self) -> str:
        return self.raw["dataset"]

    @property
    def significant_digits(self) -> int:
        return self.raw["output"]["significant_digits"]

    @property
    def float_format(self) -> str:
        return f"%.{self.significant_digits}g"

    @property
    def radix(self) -> float:
        return float(self.raw["synthesis"]["radix"])

    @property
    def simulation(self) -> SimulationSettings:
        s = self.raw["simulation"]
        return SimulationSettings(
            paths=int(s["paths"]),
            seed=int(s["seed"]),
            rng=s["rng"],
            chunk_size=int(s["chunk_size"]),
            workers=int(s["workers"]),
        )


def deep_merge(base: dict, overlay: dict) -> dict:
    """Recursively merge overlay onto base. Nested dicts merge; scalars and
    lists in the overlay replace the base value. Returns a new dict.
    """
    merged = dict(base)
    for key, value in overlay.items():
        if key in merged and isinstance(merged[key], dict) and isinstance(value, dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


@cache
def load_settings(path: Path = SETTINGS_PATH) -> Settings:
    with path.open(encoding="utf-8") as f:
        return Settings(raw=json.load(f))


SUPPORTED_AGES = load_settings().ages
