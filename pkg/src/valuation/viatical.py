"""Viatical settlement: what a third party would pay for a metastatic
policyholder's cover.

The purchaser keeps paying any premiums still due and collects the death
benefit. Remaining lifetime in the metastatic states is at most four years,
so the value is a short sum over the reflex chain.
"""

import logging
from dataclasses import dataclass

from ..engine.projection import OccupancyTrajectory
from ..models.state_model import METASTATIC
from .cashflows import benefit_moves, net_premium, reserve_table, state_pos
from .contract import ContractSpec, ValuationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ViaticalQuote:
    state: int
    duration: int
    value: float
    price: float

    @property
    def viable(self) -> bool:
        return self.value > 0.0


def viatical_value(
    spec: ContractSpec,
    traj: OccupancyTrajectory,
    state: int,
    k: int,
    purchase_fraction: float,
    premium: float | None = None,
) -> ViaticalQuote:
    """Death-benefit EPV less premium EPV from (state, k), and the offer on it.

    ``premium`` defaults to the contract's net premium.
    """
    if state not in METASTATIC:
        raise ValuationError(f"viatical quotes need a metastatic state, got {state}")
    if not 0 <= k < spec.term:
        raise ValuationError(f"duration {k} outside 0..{spec.term - 1}")
    if not 0.0 < purchase_fraction < 1.0:
        raise ValuationError(f"purchase fraction {purchase_fraction} not in (0, 1)")
    premium = net_premium(spec, traj) if premium is None else premium
    values = reserve_table(
        spec, traj, premium, moves=benefit_moves(spec, deaths_only=True)
    )
    value = float(values[k, state_pos(state)])
    quote = ViaticalQuote(state, k, value, purchase_fraction * value)
    if not quote.viable:
        logger.warning(
            "viatical value %.6g in state %d at k=%d is not positive", value, state, k
        )
    return quote
