"""Figure specifications and the default set for a run directory.

A spec names one figure: its kind, input CSVs, output path and style
options. Specs are plain data so a batch can be built, filtered and rendered
without touching the engine — figures consume only the documented CSVs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path


class SchemaError(ValueError):
    """An input CSV is missing, empty, or lacks a required column."""


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    kind: str                      # one of render.KINDS
    inputs: dict[str, str]         # role -> csv path
    output: str                    # image path
    options: dict = field(default_factory=dict)

    def input_path(self, role: str) -> Path:
        return Path(self.inputs[role])


def default_specs(in_dir: str | Path, out_dir: str | Path) -> list[FigureSpec]:
    """Every figure whose input CSV exists under ``in_dir``.

    Curves come from training_curves.csv, histograms and time series from
    episode_logs.csv, the deviation heatmap from deviation_matrix.csv.
    """
    in_dir = Path(in_dir)
    out_dir = Path(out_dir)
    specs: list[FigureSpec] = []

    curves = in_dir / "training_curves.csv"
    if curves.exists():
        specs.append(
            FigureSpec(
                figure_id="training_curves",
                kind="training_curves",
                inputs={"curves": str(curves)},
                output=str(out_dir / "training_curves.png"),
                options={"epoch_separators": True, "mean_lines": True},
            )
        )

    logs = in_dir / "episode_logs.csv"
    if logs.exists():
        histograms = [
            ("household_labor", "household", "labor_hours_total", "labor hours per quarter"),
            ("household_consumption", "household", "consumption_request_total",
             "consumption requested per quarter"),
            ("firm_price", "firm", "price", "price per unit"),
            ("firm_wage", "firm", "wage", "hourly wage"),
            ("cb_rate", "central_bank", "rate_next", "interest rate"),
            ("gov_tax_rate", "government", "tax_rate_next", "tax rate"),
            ("gov_tax_collected", "government", "total_tax_collected", "tax collected"),
        ]
        for figure_id, agent_type, column, label in histograms:
            specs.append(
                FigureSpec(
                    figure_id=f"hist_{figure_id}",
                    kind="histogram",
                    inputs={"logs": str(logs)},
                    output=str(out_dir / f"hist_{figure_id}.png"),
                    options={
                        "agent_type": agent_type,
                        "column": column,
                        "xlabel": label,
                        "mean_lines": True,
                    },
                )
            )
        specs.append(
            FigureSpec(
                figure_id="rate_inflation_timeseries",
                kind="rate_inflation_timeseries",
                inputs={"logs": str(logs)},
                output=str(out_dir / "rate_inflation_timeseries.png"),
                options={"mean_lines": True},
            )
        )
        specs.append(
            FigureSpec(
                figure_id="rate_change_histogram",
                kind="rate_change_histogram",
                inputs={"logs": str(logs)},
                output=str(out_dir / "rate_change_histogram.png"),
                options={"mean_lines": True},
            )
        )

    matrix = in_dir / "deviation_matrix.csv"
    if matrix.exists():
        specs.append(
            FigureSpec(
                figure_id="regret_heatmap",
                kind="regret_heatmap",
                inputs={"matrix": str(matrix)},
                output=str(out_dir / "regret_heatmap.png"),
            )
        )
    return specs
