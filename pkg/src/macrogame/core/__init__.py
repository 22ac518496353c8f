"""Stateless economic core: parameter records, dynamics and rewards."""

from .dynamics import (
    allocate_consumption,
    compute_inflation,
    compute_tax_credits,
    evolve_production_factor,
    produce,
    update_inventory,
    update_savings,
    welfare_weight,
)
from .params import (
    PRICE_WINDOW,
    CentralBankParams,
    FirmParams,
    GovernmentParams,
    HouseholdParams,
    NormalizationDefaults,
    WorldState,
)
from .rewards import (
    central_bank_reward,
    firm_reward,
    government_reward,
    household_reward,
    household_utility,
)

__all__ = [
    "PRICE_WINDOW",
    "CentralBankParams",
    "FirmParams",
    "GovernmentParams",
    "HouseholdParams",
    "NormalizationDefaults",
    "WorldState",
    "allocate_consumption",
    "central_bank_reward",
    "compute_inflation",
    "compute_tax_credits",
    "evolve_production_factor",
    "firm_reward",
    "government_reward",
    "household_reward",
    "household_utility",
    "produce",
    "update_inventory",
    "update_savings",
    "welfare_weight",
]
