"""Discrete action grids and index decoding.

Every agent chooses grid indices; the grids are uniform around real-world
default values (bold center entry = default action). Government credit
fractions are chosen as raw weights in {1..5} and normalized by their sum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_INDEX = 2  # center entry of every 5-point grid


def _grid(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or len(arr) < 2:
        raise ValueError(f"{name} grid must be a vector of at least 2 entries")
    if not np.all(np.diff(arr) > 0):
        raise ValueError(f"{name} grid must be strictly increasing")
    return arr


@dataclass(frozen=True)
class ActionGrids:
    """Action grids for all agent types (quarterly units)."""

    labor_hours: np.ndarray = field(
        default_factory=lambda: np.array([0.0, 240.0, 480.0, 720.0, 960.0])
    )
    consumption_units: np.ndarray = field(
        default_factory=lambda: np.array([0.0, 6.0, 12.0, 18.0, 24.0])
    )
    wages: np.ndarray = field(
        default_factory=lambda: np.array([7.25, 19.65, 32.06, 44.46, 56.87])
    )
    prices: np.ndarray = field(
        default_factory=lambda: np.array([188.0, 255.0, 322.0, 389.0, 456.0])
    )
    rates: np.ndarray = field(
        default_factory=lambda: np.array([0.0025, 0.01625, 0.03, 0.04375, 0.0575])
    )
    tax_rates: np.ndarray = field(
        default_factory=lambda: np.array([0.10, 0.1675, 0.235, 0.3025, 0.37])
    )
    fraction_raw: np.ndarray = field(
        default_factory=lambda: np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    )

    def __post_init__(self):
        for name in (
            "labor_hours",
            "consumption_units",
            "wages",
            "prices",
            "rates",
            "tax_rates",
            "fraction_raw",
        ):
            object.__setattr__(self, name, _grid(getattr(self, name), name))


@dataclass(frozen=True)
class DecodedActions:
    """Real-valued actions for one step, decoded from grid indices."""

    labor_hours: np.ndarray        # (households, firms)
    consumption_requests: np.ndarray  # (households, firms)
    wages: np.ndarray              # (firms,) in effect next step
    prices: np.ndarray             # (firms,) in effect next step
    interest_rate: float           # in effect next step
    tax_rate: float                # in effect next step
    credit_fractions: np.ndarray   # (households,), sums to 1, in effect next step


def _lookup(grid: np.ndarray, indices, agent: str, what: str) -> np.ndarray:
    idx = np.asarray(indices)
    if idx.size and (idx.min() < 0 or idx.max() >= len(grid)):
        raise ValueError(
            f"{agent}: {what} index out of range [0, {len(grid) - 1}]: {indices}"
        )
    return grid[idx]


def decode_actions(
    actions: dict[str, np.ndarray],
    grids: ActionGrids,
    n_households: int,
    n_firms: int,
) -> DecodedActions:
    """Decode a joint action of grid indices into real-valued quantities.

    ``actions`` maps agent ids to index vectors:

    * ``household_i``: ``[labor_1..J, consumption_1..J]``
    * ``firm_j``: ``[wage, price]``
    * ``central_bank``: ``[rate]``
    * ``government``: ``[tax, fraction_1..I]``
    """
    labor = np.zeros((n_households, n_firms))
    consumption = np.zeros((n_households, n_firms))
    for i in range(n_households):
        agent = f"household_{i}"
        idx = np.asarray(actions[agent], dtype=np.int64)
        if idx.shape != (2 * n_firms,):
            raise ValueError(
                f"{agent}: expected {2 * n_firms} action indices, got {idx.shape}"
            )
        labor[i] = _lookup(grids.labor_hours, idx[:n_firms], agent, "labor")
        consumption[i] = _lookup(
            grids.consumption_units, idx[n_firms:], agent, "consumption"
        )

    wages = np.zeros(n_firms)
    prices = np.zeros(n_firms)
    for j in range(n_firms):
        agent = f"firm_{j}"
        idx = np.asarray(actions[agent], dtype=np.int64)
        if idx.shape != (2,):
            raise ValueError(f"{agent}: expected 2 action indices, got {idx.shape}")
        wages[j] = _lookup(grids.wages, idx[0], agent, "wage")
        prices[j] = _lookup(grids.prices, idx[1], agent, "price")

    cb_idx = np.asarray(actions["central_bank"], dtype=np.int64)
    if cb_idx.shape != (1,):
        raise ValueError(f"central_bank: expected 1 action index, got {cb_idx.shape}")
    rate = float(_lookup(grids.rates, cb_idx[0], "central_bank", "rate"))

    gov_idx = np.asarray(actions["government"], dtype=np.int64)
    if gov_idx.shape != (1 + n_households,):
        raise ValueError(
            f"government: expected {1 + n_households} action indices, "
            f"got {gov_idx.shape}"
        )
    tax = float(_lookup(grids.tax_rates, gov_idx[0], "government", "tax"))
    raw = _lookup(grids.fraction_raw, gov_idx[1:], "government", "fraction")
    fractions = raw / raw.sum()

    return DecodedActions(
        labor_hours=labor,
        consumption_requests=consumption,
        wages=wages,
        prices=prices,
        interest_rate=rate,
        tax_rate=tax,
        credit_fractions=fractions,
    )
