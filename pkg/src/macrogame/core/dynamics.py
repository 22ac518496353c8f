"""Pure, stateless dynamics of the economy.

Every function here is a direct implementation of one update rule: goods
allocation, household savings, the firm's stochastic production factor,
Cobb-Douglas output, inventory bookkeeping, annual inflation, welfare
weights and tax-credit redistribution. All functions are pure and safe to
call concurrently.
"""

from __future__ import annotations

import numpy as np

from .params import GovernmentParams

_FEASIBILITY_TOL = 1e-9


def allocate_consumption(requests: np.ndarray, inventory: float) -> np.ndarray:
    """Split ``inventory`` units among households proportionally to requests.

    Each household receives ``min(request, inventory * request / sum(requests))``;
    with zero total demand everyone receives zero. The result never exceeds the
    request componentwise and never exceeds the inventory in total.
    """
    requests = np.asarray(requests, dtype=np.float64)
    if np.any(requests < 0):
        raise ValueError("consumption requests must be nonnegative")
    if inventory < 0:
        raise ValueError("inventory must be nonnegative")
    total = requests.sum()
    if total == 0.0:
        return np.zeros_like(requests)
    shares = inventory * requests / total
    return np.minimum(requests, shares)


def update_savings(
    savings: float,
    interest_rate: float,
    labor_income_per_firm: np.ndarray,
    consumption_cost_per_firm: np.ndarray,
    tax_rate: float,
    credit: float,
) -> float:
    """Evolve one household's savings by one quarter.

    Interest accrues on the current balance (including debt, which may make it
    more negative), labor income net of consumption cost is added, labor income
    is taxed at ``tax_rate``, and the tax credit is paid in.
    """
    income = np.asarray(labor_income_per_firm, dtype=np.float64)
    cost = np.asarray(consumption_cost_per_firm, dtype=np.float64)
    return float(
        (1.0 + interest_rate) * savings
        + np.sum(income - cost)
        - tax_rate * income.sum()
        + credit
    )


def evolve_production_factor(prev: float, rho: float, shock: float) -> float:
    """Log-autoregressive production factor: ``prev ** rho * exp(shock)``."""
    if prev <= 0:
        raise ValueError(f"production factor must be strictly positive, got {prev}")
    return float(prev**rho * np.exp(shock))


def produce(factor: float, skilled_labor: float, alpha: float) -> float:
    """Cobb-Douglas output from skill-weighted labor hours."""
    if factor <= 0:
        raise ValueError(f"production factor must be strictly positive, got {factor}")
    if skilled_labor < 0:
        raise ValueError("skilled labor must be nonnegative")
    if skilled_labor == 0.0:
        return 0.0
    return float(factor * skilled_labor**alpha)


def update_inventory(inventory: float, produced: float, consumed: float) -> float:
    """Next-quarter inventory: stock plus supply minus demand, never negative."""
    result = inventory + produced - consumed
    if result < -_FEASIBILITY_TOL:
        raise RuntimeError(
            f"inventory went negative ({result}): consumption {consumed} exceeds "
            f"stock {inventory} plus production {produced}"
        )
    return float(max(result, 0.0))


def compute_inflation(price_history: np.ndarray) -> float:
    """Annual inflation: newest quarterly price total over the oldest.

    ``price_history`` spans five consecutive quarters, newest last.
    """
    history = np.asarray(price_history, dtype=np.float64)
    if np.any(history <= 0):
        raise ValueError("price history entries must be strictly positive")
    return float(history[-1] / history[0])


def welfare_weight(savings: float, params: GovernmentParams) -> float:
    """Social-welfare weight of a household as a function of its savings.

    Decreasing in savings: capped at ``weight_cap`` for deep debt, floored at
    ``weight_floor`` for high savings, with twice the slope on the debt side.
    """
    if savings > 0:
        return float(
            max(params.weight_floor, -params.weight_slope * savings + params.weight_intercept)
        )
    return float(
        min(params.weight_cap, -2.0 * params.weight_slope * savings + params.weight_intercept)
    )


def compute_tax_credits(
    fractions: np.ndarray, total_tax_collected: float, xi: float
) -> np.ndarray:
    """Redistribute fraction ``xi`` of collected taxes according to ``fractions``.

    ``fractions`` must be a probability vector over households.
    """
    fractions = np.asarray(fractions, dtype=np.float64)
    if np.any(fractions < 0):
        raise ValueError("credit fractions must be nonnegative")
    if abs(fractions.sum() - 1.0) > 1e-9:
        raise ValueError(
            f"credit fractions must sum to 1, got {fractions.sum()!r}"
        )
    return xi * fractions * total_tax_collected
