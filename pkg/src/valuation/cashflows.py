"""Expected present values, net premiums, reserves and cashflow schedules.

Every quantity is driven by two payment tables per contract: ``due`` (N,),
the premium owed at the start of a year in each state, and ``moves`` (N, N),
the benefit paid at the end of a year spent moving from state i to j.
Reserves run the backward recursion

    V_i(k) = -premium_i(k) + v * sum_j Q_ij(k) * (moves_ij + V_j(k + 1))

with V(n) = 0.
"""

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from ..engine.matrices import CII_MODEL, N_STATES
from ..engine.projection import OccupancyTrajectory
from ..models.state_model import (
    CANCER,
    DEATH_METASTATIC,
    DEATH_OTHER,
    HEALTHY,
    METASTATIC,
)
from .contract import ContractSpec, ValuationError

logger = logging.getLogger(__name__)

DISEASE_STATE = METASTATIC[0]


def state_pos(state: int) -> int:
    return CII_MODEL.index_of(state)


def check_trajectory(spec: ContractSpec, traj: OccupancyTrajectory) -> None:
    if traj.term != spec.term or traj.entry_age != spec.entry_age:
        raise ValuationError(
            f"trajectory covers {traj.entry_age}+{traj.term}, "
            f"contract covers {spec.entry_age}+{spec.term}"
        )
    if traj.sex is not None and traj.sex != spec.sex:
        raise ValuationError(f"{traj.sex} trajectory for a {spec.sex} contract")


def benefit_moves(spec: ContractSpec, *, deaths_only: bool = False) -> np.ndarray:
    """End-of-year benefit for each move i -> j (staying included)."""
    moves = np.zeros((N_STATES, N_STATES))
    for origin in (HEALTHY, CANCER):
        moves[state_pos(origin), state_pos(DEATH_OTHER)] = spec.death_benefit
    for origin in METASTATIC:
        moves[state_pos(origin), state_pos(DEATH_METASTATIC)] = (
            spec.metastatic_death_payment
        )
    if deaths_only:
        return moves
    for origin in (HEALTHY, CANCER):
        moves[state_pos(origin), state_pos(DISEASE_STATE)] = spec.disease_payment
    moves[state_pos(HEALTHY), state_pos(CANCER)] = spec.early_diagnosis_benefit
    for state in METASTATIC:
        # Annuity for a year begun in j, whatever the move.
        moves[state_pos(state), :] += spec.annuity_rate(state)
    return moves


def premium_due(spec: ContractSpec, k: int, premium: float) -> np.ndarray:
    """Premium owed at the start of year k in each state."""
    due = np.zeros(N_STATES)
    if spec.premium_mode == "level" or k == 0:
        due[[state_pos(s) for s in spec.premium_states]] = premium
    return due


def _expected_moves(traj: OccupancyTrajectory, moves: np.ndarray) -> np.ndarray:
    """Expected end-of-year outgo for each year k."""
    return np.array(
        [float(np.sum(traj.transition_mass(k) * moves)) for k in range(traj.term)]
    )


def epv_benefits(spec: ContractSpec, traj: OccupancyTrajectory) -> float:
    check_trajectory(spec, traj)
    outgo = _expected_moves(traj, benefit_moves(spec))
    v = spec.discount_factor
    return float(np.sum(outgo * v ** np.arange(1, spec.term + 1)))


def premium_annuity(spec: ContractSpec, traj: OccupancyTrajectory) -> float:
    """EPV of a unit premium under the contract's premium mode."""
    check_trajectory(spec, traj)
    v = spec.discount_factor
    return float(
        sum(
            v**k * premium_due(spec, k, 1.0) @ traj.at(k) for k in range(spec.term)
        )
    )


def net_premium(spec: ContractSpec, traj: OccupancyTrajectory) -> float:
    """Equivalence-principle premium: EPV(premiums) = EPV(benefits) at issue."""
    factor = premium_annuity(spec, traj)
    if factor <= 0.0:
        raise ValuationError("no premium is ever expected: annuity factor is 0")
    premium = epv_benefits(spec, traj) / factor
    logger.debug(
        "%s net premium %.6g on factor %.6g", spec.premium_mode, premium, factor
    )
    return premium


def reserve_table(
    spec: ContractSpec,
    traj: OccupancyTrajectory,
    premium: float,
    *,
    moves: np.ndarray | None = None,
) -> np.ndarray:
    """Prospective reserves V_i(k) for k = 0..n, shape (n + 1, N)."""
    check_trajectory(spec, traj)
    moves = benefit_moves(spec) if moves is None else moves
    v = spec.discount_factor
    values = np.zeros((spec.term + 1, N_STATES))
    for k in range(spec.term - 1, -1, -1):
        future = moves + values[k + 1][None, :]
        values[k] = -premium_due(spec, k, premium) + v * np.sum(
            traj.matrices[k] * future, axis=1
        )
    return values


def reserve(
    spec: ContractSpec,
    traj: OccupancyTrajectory,
    k: int,
    state: int,
    premium: float | None = None,
) -> float:
    """Benefits less premiums still to come, given ``state`` at duration k.

    Any living state is accepted: transient states 1 and 2 and the reflex
    metastatic states 3..6. Absorbing states raise. ``premium`` defaults to
    the net premium.
    """
    if CII_MODEL.state(state).kind == "absorbing":
        raise ValuationError(f"no reserve is held in absorbing state {state}")
    if not 0 <= k <= spec.term:
        raise ValuationError(f"duration {k} outside 0..{spec.term}")
    premium = net_premium(spec, traj) if premium is None else premium
    return float(reserve_table(spec, traj, premium)[k, state_pos(state)])


@dataclass(frozen=True, eq=False)
class CashflowSchedule:
    entry_age: int
    discount_factor: float
    benefits: np.ndarray  # expected outgo paid at the end of year k
    premiums: np.ndarray  # expected income at the start of year k

    @property
    def discounted_benefits(self) -> np.ndarray:
        years = np.arange(1, len(self.benefits) + 1)
        return self.benefits * self.discount_factor**years

    @property
    def discounted_premiums(self) -> np.ndarray:
        return self.premiums * self.discount_factor ** np.arange(len(self.premiums))

    def to_frame(self) -> pd.DataFrame:
        k = np.arange(len(self.benefits))
        return pd.DataFrame(
            {
                "k": k,
                "age": self.entry_age + k,
                "benefits": self.benefits,
                "benefits_discounted": self.discounted_benefits,
                "premiums": self.premiums,
                "premiums_discounted": self.discounted_premiums,
            }
        )


def cashflow_schedule(
    spec: ContractSpec, traj: OccupancyTrajectory, premium: float
) -> CashflowSchedule:
    check_trajectory(spec, traj)
    if premium < 0:
        raise ValuationError(f"premium must be nonnegative, got {premium}")
    income = np.array(
        [premium_due(spec, k, premium) @ traj.at(k) for k in range(spec.term)]
    )
    return CashflowSchedule(
        spec.entry_age,
        spec.discount_factor,
        _expected_moves(traj, benefit_moves(spec)),
        income,
    )
