"""Agent parameter records and the simulation world state.

Four parameter records (household, firm, central bank, government) hold every
heterogeneity knob of the economy, and ``NormalizationDefaults`` holds the
calibration constants used to put rewards and observations on a common scale.
All records validate their invariants on construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _as_float_vector(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-d vector, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class HouseholdParams:
    """Per-household heterogeneity: skills per firm and utility curvature."""

    skills: np.ndarray
    gamma: float = 0.33
    nu: float = 0.5
    mu: float = 0.1
    discount: float = 0.99

    def __post_init__(self):
        object.__setattr__(self, "skills", _as_float_vector(self.skills, "skills"))
        if not np.all(self.skills > 0):
            raise ValueError("household skills must be strictly positive")
        # gamma == 1 would divide by zero in the isoelastic utility
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must lie strictly inside (0, 1), got {self.gamma}")
        if self.nu < 0:
            raise ValueError(f"nu must be >= 0, got {self.nu}")
        if self.mu < 0:
            raise ValueError(f"mu must be >= 0, got {self.mu}")
        if not 0.0 <= self.discount < 1.0:
            raise ValueError(f"discount must lie in [0, 1), got {self.discount}")

    @property
    def n_firms(self) -> int:
        return len(self.skills)


@dataclass(frozen=True)
class FirmParams:
    """Per-firm sector heterogeneity: shock process, technology, inventory risk."""

    rho: float = 0.97
    shock_mean: float = 0.0
    shock_std: float = 0.1
    alpha: float = 2.0 / 3.0
    inventory_risk: float = 0.1
    discount: float = 0.99

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [0, 1], got {self.rho}")
        if self.shock_std < 0:
            raise ValueError(f"shock_std must be >= 0, got {self.shock_std}")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.inventory_risk < 0:
            raise ValueError(f"inventory_risk must be >= 0, got {self.inventory_risk}")
        if not 0.0 <= self.discount < 1.0:
            raise ValueError(f"discount must lie in [0, 1), got {self.discount}")


@dataclass(frozen=True)
class CentralBankParams:
    """Inflation target and the weight on the production term of the reward."""

    target_inflation: float = 1.02
    production_weight: float = 0.25
    discount: float = 0.99

    def __post_init__(self):
        if self.production_weight <= 0:
            raise ValueError(
                f"production_weight must be > 0, got {self.production_weight}"
            )
        if not 0.0 <= self.discount < 1.0:
            raise ValueError(f"discount must lie in [0, 1), got {self.discount}")


@dataclass(frozen=True)
class GovernmentParams:
    """Redistribution fraction and the welfare-weight schedule parameters."""

    redistribution_fraction: float = 0.1
    weight_slope: float = 1.0
    weight_intercept: float = 1.2
    weight_floor: float = 1e-3
    weight_cap: float = 3.2
    discount: float = 0.99

    def __post_init__(self):
        if not 0.0 <= self.redistribution_fraction <= 1.0:
            raise ValueError(
                "redistribution_fraction must lie in [0, 1], "
                f"got {self.redistribution_fraction}"
            )
        if self.weight_slope <= 0:
            raise ValueError(f"weight_slope must be > 0, got {self.weight_slope}")
        if self.weight_intercept <= 0:
            raise ValueError(
                f"weight_intercept must be > 0, got {self.weight_intercept}"
            )
        if not 0.0 < self.weight_floor < self.weight_cap:
            raise ValueError(
                "weight bounds must satisfy cap > floor > 0, got "
                f"floor={self.weight_floor}, cap={self.weight_cap}"
            )
        if not 0.0 <= self.discount < 1.0:
            raise ValueError(f"discount must lie in [0, 1), got {self.discount}")


@dataclass(frozen=True)
class NormalizationDefaults:
    """Calibration constants: default labor hours/quarter, consumption units,
    price per unit and hourly wage. These are the bold grid centers of the
    action spaces and anchor all reward/observation normalization."""

    default_labor: float = 480.0
    default_consumption: float = 12.0
    default_price: float = 322.0
    default_wage: float = 32.06

    def __post_init__(self):
        for name in (
            "default_labor",
            "default_consumption",
            "default_price",
            "default_wage",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


PRICE_WINDOW = 5  # quarters of total-price history kept for annual inflation


@dataclass
class WorldState:
    """Full mutable simulation state at one quarter.

    ``price_history`` holds exactly the last ``PRICE_WINDOW`` quarterly totals
    of goods prices (newest last); annual inflation is newest/oldest.
    """

    savings: np.ndarray          # per household, $
    inventory: np.ndarray        # per firm, units, >= 0
    prices: np.ndarray           # per firm, $/unit, in effect this quarter
    wages: np.ndarray            # per firm, $/hour, in effect this quarter
    production_factor: np.ndarray  # per firm, > 0, value from previous quarter
    price_history: np.ndarray    # last PRICE_WINDOW total prices, $
    interest_rate: float         # per quarter
    tax_rate: float
    credits: np.ndarray          # per household, $, paid out this quarter
    step: int = 0

    # aggregates realized in the previous quarter, used in observations
    last_skilled_labor: np.ndarray = field(default=None)       # per firm
    last_consumption: np.ndarray = field(default=None)         # per firm
    last_tax_per_household: np.ndarray = field(default=None)   # per household
    last_total_production: float = 0.0

    def __post_init__(self):
        for name in ("savings", "inventory", "prices", "wages",
                     "production_factor", "price_history", "credits"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        if self.last_skilled_labor is None:
            self.last_skilled_labor = np.zeros_like(self.inventory)
        if self.last_consumption is None:
            self.last_consumption = np.zeros_like(self.inventory)
        if self.last_tax_per_household is None:
            self.last_tax_per_household = np.zeros_like(self.savings)
        if np.any(self.inventory < 0):
            raise ValueError("inventory must be nonnegative componentwise")
        if len(self.price_history) != PRICE_WINDOW:
            raise ValueError(
                f"price_history must hold exactly {PRICE_WINDOW} entries, "
                f"got {len(self.price_history)}"
            )
        if not np.all(self.production_factor > 0):
            raise ValueError("production_factor must be strictly positive")

    @property
    def n_households(self) -> int:
        return len(self.savings)

    @property
    def n_firms(self) -> int:
        return len(self.inventory)
