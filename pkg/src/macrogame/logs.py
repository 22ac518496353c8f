"""CSV schemas and writers for training curves, episode logs, utility
tensors and regret reports.

All writers emit deterministic bodies (no timestamps) so reruns with the same
config and seed produce byte-identical files. Column meanings are documented
in the README; blank cells mean "not applicable to this agent type".
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .egta import EmpiricalGame, RegretReport
from .env.config import ScenarioConfig
from .ppo import CurvePoint, EpisodeData

# bump when any CSV column set changes; recorded in every run manifest
SCHEMA_VERSION = 1

CURVE_COLUMNS = [
    "scheme", "epoch", "episode", "agent_id", "agent_type",
    "discounted_return", "moving_avg",
]

EPISODE_LOG_COLUMNS = [
    "scheme", "episode", "step", "agent_id", "agent_type",
    "reward_raw", "reward_norm",
    # household
    "labor_hours_total", "consumption_request_total",
    "consumption_realized_total", "savings_next",
    # firm
    "wage", "price", "production", "consumption_received", "inventory_next",
    # central bank
    "rate_next", "inflation",
    # government
    "tax_rate_next", "total_tax_collected",
]

UTILITY_COLUMNS = ["scheme", "cell", "agent_type", "utility", "runs"]

REGRET_COLUMNS = [
    "scheme", "agent_type", "base_utility", "absolute_regret",
    "percentage_regret", "best_deviation",
]


def _fmt(x) -> str:
    """Deterministic full-precision decimal text for a scalar."""
    return repr(float(x))


def _write_csv(path: Path, columns: list[str], rows: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=columns, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if v is None else v) for k, v in row.items()})


def write_curves(path: str | Path, curves: list[CurvePoint]) -> None:
    rows = [
        {
            "scheme": c.scheme,
            "epoch": c.epoch,
            "episode": c.episode,
            "agent_id": c.agent_id,
            "agent_type": c.agent_type,
            "discounted_return": _fmt(c.discounted_return),
            "moving_avg": _fmt(c.moving_avg),
        }
        for c in curves
    ]
    _write_csv(Path(path), CURVE_COLUMNS, rows)


def episode_rows(
    scheme: str, episode_index: int, episode: EpisodeData, config: ScenarioConfig
) -> list[dict]:
    """One row per agent per step, with decoded actions and diagnostics."""
    rows: list[dict] = []
    for t, info in enumerate(episode.infos):
        decoded = info["decoded"]
        in_effect = info["in_effect"]
        raw = info["rewards_raw"]
        norm = info["rewards_normalized"]

        def base(agent_id: str, kind: str) -> dict:
            return {
                "scheme": scheme,
                "episode": episode_index,
                "step": t,
                "agent_id": agent_id,
                "agent_type": kind,
                "reward_raw": _fmt(raw[agent_id]),
                "reward_norm": _fmt(norm[agent_id]),
            }

        for i in range(config.n_households):
            row = base(f"household_{i}", "household")
            row.update(
                labor_hours_total=_fmt(info["labor_hours"][i].sum()),
                consumption_request_total=_fmt(info["consumption_requests"][i].sum()),
                consumption_realized_total=_fmt(info["realized_consumption"][i].sum()),
                savings_next=_fmt(info["savings_after"][i]),
            )
            rows.append(row)
        for j in range(config.n_firms):
            row = base(f"firm_{j}", "firm")
            row.update(
                wage=_fmt(in_effect["wages"][j]),
                price=_fmt(in_effect["prices"][j]),
                production=_fmt(info["production"][j]),
                consumption_received=_fmt(info["realized_consumption"][:, j].sum()),
                inventory_next=_fmt(info["inventory_next"][j]),
            )
            rows.append(row)
        row = base("central_bank", "central_bank")
        row.update(
            rate_next=_fmt(decoded.interest_rate),
            inflation=_fmt(info["inflation"]),
        )
        rows.append(row)
        row = base("government", "government")
        row.update(
            tax_rate_next=_fmt(decoded.tax_rate),
            total_tax_collected=_fmt(info["total_tax"]),
        )
        rows.append(row)
    return rows


def write_episode_log(path: str | Path, rows: list[dict]) -> None:
    _write_csv(Path(path), EPISODE_LOG_COLUMNS, rows)


def read_episode_log(path: str | Path) -> list[dict]:
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def write_utility_tensor(path: str | Path, scheme: str, game: EmpiricalGame) -> None:
    tensor = game.require_complete()
    rows = []
    for cell in np.ndindex(*game.sizes):
        for i, player in enumerate(game.players):
            rows.append(
                {
                    "scheme": scheme,
                    "cell": "/".join(str(k) for k in cell),
                    "agent_type": player,
                    "utility": _fmt(tensor[cell + (i,)]),
                    "runs": game.runs_per_cell,
                }
            )
    _write_csv(Path(path), UTILITY_COLUMNS, rows)


def regret_rows(scheme: str, report: RegretReport) -> list[dict]:
    rows = []
    for player, entry in report.entries.items():
        rows.append(
            {
                "scheme": scheme,
                "agent_type": player,
                "base_utility": _fmt(entry.base_utility),
                "absolute_regret": _fmt(entry.regret),
                "percentage_regret": (
                    "undefined" if entry.percentage is None else _fmt(entry.percentage)
                ),
                "best_deviation": entry.best_deviation,
            }
        )
    rows.append(
        {
            "scheme": scheme,
            "agent_type": "total",
            "base_utility": _fmt(report.total_utility),
            "absolute_regret": _fmt(report.total_regret),
            "percentage_regret": (
                "undefined"
                if report.total_percentage is None
                else _fmt(report.total_percentage)
            ),
            "best_deviation": "",
        }
    )
    return rows


def write_regret_report(path: str | Path, rows: list[dict]) -> None:
    _write_csv(Path(path), REGRET_COLUMNS, rows)


DEVIATION_COLUMNS = ["scheme", "agent_type", "deviation", "utility", "base_utility"]


def deviation_matrix_rows(scheme: str, report: RegretReport) -> list[dict]:
    """Long-form unilateral-deviation utilities behind a regret report."""
    rows = []
    for player, entry in report.entries.items():
        for name, utility in entry.deviation_utilities.items():
            rows.append(
                {
                    "scheme": scheme,
                    "agent_type": player,
                    "deviation": name,
                    "utility": _fmt(utility),
                    "base_utility": _fmt(entry.base_utility),
                }
            )
    return rows


def write_deviation_matrix(path: str | Path, rows: list[dict]) -> None:
    _write_csv(Path(path), DEVIATION_COLUMNS, rows)
