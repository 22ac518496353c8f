"""Per-agent reward functions, in raw units and in normalized units.

Raw rewards are in natural units (utils, dollars, squared ratios); the
normalized forms rescale each term by the calibration defaults so that all
agent types see rewards of comparable magnitude during learning:

* household: labor hours divided by the default hours, savings divided by
  (default hours * total default wages) times the mean current goods price;
* firm: revenue over (default price * total default consumption), labor cost
  over (default wage * total default hours), inventory risk over
  (default price * exp(shock_mean + 10 * shock_std) * total default hours);
* central bank: total production divided by the total default output
  ``sum_j (I * default_labor) ** alpha_j``;
* government: welfare weights applied to the households' normalized rewards.
"""

from __future__ import annotations

import numpy as np

from .params import (
    CentralBankParams,
    FirmParams,
    HouseholdParams,
    NormalizationDefaults,
)


def household_utility(c: float, n: float, m: float, params: HouseholdParams) -> float:
    """Isoelastic utility of consumption and savings minus quadratic labor pain.

    Negative savings (debt) contribute the mirrored negative isoelastic term.
    """
    if c < 0:
        raise ValueError("consumption must be nonnegative")
    if n < 0:
        raise ValueError("labor must be nonnegative")
    one_minus_gamma = 1.0 - params.gamma
    consumption_term = c**one_minus_gamma / one_minus_gamma
    savings_term = (
        params.mu * np.sign(m) * abs(m) ** one_minus_gamma / one_minus_gamma
    )
    return float(consumption_term - params.nu * n**2 + savings_term)


def household_reward(
    realized_consumption: np.ndarray,
    labor: np.ndarray,
    next_savings: float,
    params: HouseholdParams,
    *,
    normalized: bool = False,
    norm: NormalizationDefaults | None = None,
    current_prices: np.ndarray | None = None,
) -> float:
    """Sum over firms of the household's per-firm utility.

    The savings term enters once per firm with the same next-quarter balance.
    The normalized form divides labor by the default hours and the balance by
    (default hours * sum of default wages) * (mean current goods price).
    """
    consumption = np.asarray(realized_consumption, dtype=np.float64)
    hours = np.asarray(labor, dtype=np.float64)
    if consumption.shape != hours.shape:
        raise ValueError("consumption and labor vectors must align by firm")
    n_firms = len(consumption)
    savings = next_savings
    if normalized:
        if norm is None or current_prices is None:
            raise ValueError("normalized reward needs norm defaults and prices")
        mean_price = float(np.mean(current_prices))
        total_default_wage = n_firms * norm.default_wage
        hours = hours / norm.default_labor
        savings = next_savings / (norm.default_labor * total_default_wage * mean_price)
    return float(
        sum(
            household_utility(consumption[j], hours[j], savings, params)
            for j in range(n_firms)
        )
    )


def firm_reward(
    price: float,
    wage: float,
    total_consumption: float,
    skilled_labor: float,
    next_inventory: float,
    params: FirmParams,
    *,
    normalized: bool = False,
    norm: NormalizationDefaults | None = None,
    n_households: int | None = None,
) -> float:
    """Profit (revenue minus skilled-labor cost) less the inventory-risk penalty."""
    revenue = price * total_consumption
    labor_cost = wage * skilled_labor
    inventory_risk = params.inventory_risk * price * next_inventory
    if not normalized:
        return float(revenue - labor_cost - inventory_risk)
    if norm is None or n_households is None:
        raise ValueError("normalized reward needs norm defaults and household count")
    total_default_consumption = n_households * norm.default_consumption
    total_default_labor = n_households * norm.default_labor
    inventory_scale = (
        norm.default_price
        * np.exp(params.shock_mean + 10.0 * params.shock_std)
        * total_default_labor
    )
    return float(
        revenue / (norm.default_price * total_default_consumption)
        - labor_cost / (norm.default_wage * total_default_labor)
        - inventory_risk / inventory_scale
    )


def central_bank_reward(
    inflation: float,
    total_production: float,
    params: CentralBankParams,
    *,
    normalized: bool = False,
    firm_alphas: np.ndarray | None = None,
    n_households: int | None = None,
    norm: NormalizationDefaults | None = None,
) -> float:
    """Penalty on missing the inflation target plus a squared production bonus."""
    if total_production < 0:
        raise ValueError("total production must be nonnegative")
    gap = inflation - params.target_inflation
    production = total_production
    if normalized:
        if firm_alphas is None or n_households is None or norm is None:
            raise ValueError(
                "normalized reward needs firm alphas, household count and defaults"
            )
        alphas = np.asarray(firm_alphas, dtype=np.float64)
        default_output = np.sum(
            (n_households * norm.default_labor) ** alphas
        )
        production = total_production / default_output
    return float(-(gap**2) + params.production_weight * production**2)


def government_reward(weights: np.ndarray, household_rewards: np.ndarray) -> float:
    """Welfare-weighted sum of household rewards.

    Pass normalized household rewards to obtain the normalized form.
    """
    weights = np.asarray(weights, dtype=np.float64)
    rewards = np.asarray(household_rewards, dtype=np.float64)
    if weights.shape != rewards.shape:
        raise ValueError("weights and rewards must align by household")
    return float(np.dot(weights, rewards))
