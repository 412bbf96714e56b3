"""Contract valuation on top of occupancy trajectories."""

from .cashflows import (
    CashflowSchedule,
    benefit_moves,
    cashflow_schedule,
    epv_benefits,
    net_premium,
    premium_annuity,
    reserve,
    reserve_table,
)
from .contract import ContractSpec, ValuationError, load_contract
from .viatical import ViaticalQuote, viatical_value

__all__ = [
    "CashflowSchedule",
    "ContractSpec",
    "ValuationError",
    "ViaticalQuote",
    "benefit_moves",
    "cashflow_schedule",
    "epv_benefits",
    "load_contract",
    "net_premium",
    "premium_annuity",
    "reserve",
    "reserve_table",
    "viatical_value",
]
