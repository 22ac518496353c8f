"""Stylized-fact checks over episode logs.

Both checks consume episode-log rows (dicts with the documented CSV columns)
and return a verdict record: ``pass``, ``fail`` or ``inconclusive`` plus the
statistic that drove the verdict. They validate the simulator qualitatively:
demand should fall with price, and the policy rate should rise with
inflation.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np


@dataclass
class FactVerdict:
    name: str
    verdict: str               # "pass" | "fail" | "inconclusive"
    statistic: float | None
    details: dict = field(default_factory=dict)


def _rank(values: np.ndarray) -> np.ndarray:
    """Average ranks (ties share the mean rank)."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    ranks[order] = np.arange(1, len(values) + 1)
    for v in np.unique(values):
        mask = values == v
        if mask.sum() > 1:
            ranks[mask] = ranks[mask].mean()
    return ranks


def _spearman(x: np.ndarray, y: np.ndarray) -> float:
    rx, ry = _rank(x), _rank(y)
    if rx.std() == 0 or ry.std() == 0:
        return 0.0
    return float(np.corrcoef(rx, ry)[0, 1])


def check_law_of_demand(rows: list[dict]) -> FactVerdict:
    """Higher-priced firms should receive less consumption.

    Aggregates firm rows to per-episode mean price and total realized
    consumption, averages across episodes per firm, and requires a negative
    price-consumption rank correlation across firms. Constant prices across
    firms make the check inconclusive.
    """
    per_episode: dict[tuple, dict[str, list[float]]] = defaultdict(
        lambda: {"price": [], "consumption": []}
    )
    for row in rows:
        if row.get("agent_type") != "firm":
            continue
        key = (row["episode"], row["agent_id"])
        per_episode[key]["price"].append(float(row["price"]))
        per_episode[key]["consumption"].append(float(row["consumption_received"]))
    if not per_episode:
        return FactVerdict("law_of_demand", "inconclusive", None,
                           {"reason": "no firm rows"})

    firm_prices: dict[str, list[float]] = defaultdict(list)
    firm_consumption: dict[str, list[float]] = defaultdict(list)
    for (_, firm), series in per_episode.items():
        firm_prices[firm].append(float(np.mean(series["price"])))
        firm_consumption[firm].append(float(np.sum(series["consumption"])))

    firms = sorted(firm_prices)
    if len(firms) < 2:
        return FactVerdict("law_of_demand", "inconclusive", None,
                           {"reason": "needs at least two firms"})
    mean_price = np.array([np.mean(firm_prices[f]) for f in firms])
    mean_consumption = np.array([np.mean(firm_consumption[f]) for f in firms])
    if np.ptp(mean_price) < 1e-9:
        return FactVerdict(
            "law_of_demand", "inconclusive", None,
            {"reason": "constant prices across firms",
             "mean_price": dict(zip(firms, mean_price))},
        )
    correlation = _spearman(mean_price, mean_consumption)
    verdict = "pass" if correlation < 0 else "fail"
    return FactVerdict(
        "law_of_demand", verdict, correlation,
        {
            "mean_price": dict(zip(firms, mean_price.tolist())),
            "mean_consumption": dict(zip(firms, mean_consumption.tolist())),
        },
    )


def check_rate_inflation_relation(
    rows: list[dict], target_inflation: float = 1.02
) -> FactVerdict:
    """The chosen policy rate should be higher when inflation runs above
    target than when it runs below.

    Pairs each quarter's inflation with the rate chosen for the next quarter
    and compares group means; quarters exactly on target are dropped. All
    quarters on one side of the target make the check inconclusive.
    """
    above, below = [], []
    for row in rows:
        if row.get("agent_type") != "central_bank":
            continue
        inflation = float(row["inflation"])
        rate_next = float(row["rate_next"])
        if inflation > target_inflation:
            above.append(rate_next)
        elif inflation < target_inflation:
            below.append(rate_next)
    if not above or not below:
        return FactVerdict(
            "rate_inflation_relation", "inconclusive", None,
            {"reason": "all quarters on one side of the inflation target",
             "n_above": len(above), "n_below": len(below)},
        )
    gap = float(np.mean(above) - np.mean(below))
    verdict = "pass" if gap > 0 else "fail"
    return FactVerdict(
        "rate_inflation_relation", verdict, gap,
        {
            "mean_rate_above_target": float(np.mean(above)),
            "mean_rate_below_target": float(np.mean(below)),
            "n_above": len(above),
            "n_below": len(below),
        },
    )
