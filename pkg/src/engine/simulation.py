"""Monte Carlo paths through the chain, checked against the projection.

Paths are drawn in fixed-size chunks. Chunk c always uses child c of the
root SeedSequence, so counts depend only on (seed, chunk_size, paths) and
never on how many workers run the chunks.
"""

import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import pandas as pd

from ..estimators.context import EstimatorContext
from .matrices import CII_MODEL, N_STATES, ProjectionError
from .projection import OccupancyTrajectory, initial_distribution, trajectory

logger = logging.getLogger(__name__)

BIT_GENERATORS: dict[str, type[np.random.BitGenerator]] = {
    "PCG64": np.random.PCG64,
    "PCG64DXSM": np.random.PCG64DXSM,
    "Philox": np.random.Philox,
    "SFC64": np.random.SFC64,
    "MT19937": np.random.MT19937,
}


def make_generator(name: str, seed: np.random.SeedSequence) -> np.random.Generator:
    try:
        bit_generator = BIT_GENERATORS[name]
    except KeyError as error:
        options = ", ".join(BIT_GENERATORS)
        message = f"unknown generator {name!r}; options: {options}"
        raise ProjectionError(message) from error
    return np.random.Generator(bit_generator(seed))


def _cumulative(matrix: np.ndarray) -> np.ndarray:
    """Row-wise CDFs, pinned to exactly 1 from each row's last positive entry."""
    cdf = np.cumsum(matrix, axis=-1)
    for row, probs in zip(cdf, matrix, strict=True):
        row[np.flatnonzero(probs > 0)[-1] :] = 1.0
    return cdf


def _draw(uniforms: np.ndarray, cdf_rows: np.ndarray) -> np.ndarray:
    return (uniforms[:, None] >= cdf_rows).sum(axis=1)


@dataclass(frozen=True, eq=False)
class SimulationResult:
    entry_age: int
    paths: int
    seed: int
    rng: str
    occupancy: np.ndarray  # (term + 1, N) path counts
    transitions: np.ndarray  # (term, N, N) move counts

    @property
    def term(self) -> int:
        return len(self.transitions)

    @property
    def frequencies(self) -> np.ndarray:
        return self.occupancy / self.paths

    def absorbing_leaks(self) -> int:
        """Moves out of an absorbing state; any nonzero value is a defect."""
        leaks = 0
        for state in CII_MODEL.of_kind("absorbing"):
            pos = CII_MODEL.index_of(state)
            row = self.transitions[:, pos, :]
            leaks += int(row.sum() - row[:, pos].sum())
        return leaks

    def deviation(self, expected: OccupancyTrajectory) -> float:
        """Sup norm between simulated frequencies and projected occupancy."""
        if expected.vectors.shape != self.occupancy.shape:
            raise ProjectionError("simulation and projection cover different terms")
        return float(np.max(np.abs(self.frequencies - expected.vectors)))

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(
            self.frequencies, columns=[f"f{s}" for s in CII_MODEL.ids]
        )
        frame.insert(0, "age", self.entry_age + np.arange(self.term + 1))
        frame.insert(0, "k", np.arange(self.term + 1))
        return frame


def _run_chunk(
    cdfs: list[np.ndarray],
    start_cdf: np.ndarray,
    size: int,
    seed: np.random.SeedSequence,
    rng: str,
) -> tuple[np.ndarray, np.ndarray]:
    generator = make_generator(rng, seed)
    occupancy = np.zeros((len(cdfs) + 1, N_STATES), dtype=np.int64)
    moves = np.zeros((len(cdfs), N_STATES, N_STATES), dtype=np.int64)
    states = _draw(generator.random(size), np.broadcast_to(start_cdf, (size, N_STATES)))
    occupancy[0] = np.bincount(states, minlength=N_STATES)
    for k, cdf in enumerate(cdfs):
        nxt = _draw(generator.random(size), cdf[states])
        pairs = np.bincount(states * N_STATES + nxt, minlength=N_STATES * N_STATES)
        moves[k] = pairs.reshape(N_STATES, N_STATES)
        occupancy[k + 1] = np.bincount(nxt, minlength=N_STATES)
        states = nxt
    return occupancy, moves


def simulate_matrices(
    matrices: Sequence[np.ndarray],
    paths: int,
    seed: int,
    *,
    entry_age: int = 0,
    rng: str = "PCG64",
    chunk_size: int = 100_000,
    workers: int = 1,
    p0: Sequence[float] | None = None,
) -> SimulationResult:
    """Simulate ``paths`` independent lives through Q(0), ..., Q(term - 1)."""
    if paths < 1 or chunk_size < 1 or workers < 1:
        raise ProjectionError("paths, chunk_size and workers must be positive")
    make_generator(rng, np.random.SeedSequence(seed))
    arrays = [np.asarray(m, dtype=float) for m in matrices]
    for k, matrix in enumerate(arrays):
        if matrix.shape != (N_STATES, N_STATES) or np.any(
            np.abs(matrix.sum(axis=1) - 1.0) > 1e-12
        ):
            raise ProjectionError(f"Q({k}) is not a row-stochastic N x N matrix")
    cdfs = [_cumulative(m) for m in arrays]
    start_cdf = _cumulative(initial_distribution(p0)[None, :])[0]
    sizes = [min(chunk_size, paths - start) for start in range(0, paths, chunk_size)]
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    logger.info(
        "simulating %d paths in %d chunks on %d workers", paths, len(sizes), workers
    )
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(
            pool.map(
                lambda job: _run_chunk(cdfs, start_cdf, job[0], job[1], rng),
                zip(sizes, seeds, strict=True),
            )
        )
    occupancy = sum(r[0] for r in results)
    moves = sum(r[1] for r in results)
    result = SimulationResult(entry_age, paths, seed, rng, occupancy, moves)
    if leaks := result.absorbing_leaks():
        logger.error("%d simulated moves left an absorbing state", leaks)
    return result


def simulate(
    ctx: EstimatorContext,
    entry_age: int,
    term: int,
    paths: int,
    seed: int,
    *,
    rng: str = "PCG64",
    chunk_size: int = 100_000,
    workers: int = 1,
) -> tuple[SimulationResult, OccupancyTrajectory]:
    """Simulate the cohort and return it with the projection it estimates."""
    expected = trajectory(ctx, entry_age, term)
    result = simulate_matrices(
        expected.matrices,
        paths,
        seed,
        entry_age=entry_age,
        rng=rng,
        chunk_size=chunk_size,
        workers=workers,
    )
    logger.info("sup-norm deviation from projection: %.3g", result.deviation(expected))
    return result, expected
