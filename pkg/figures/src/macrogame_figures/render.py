"""Figure rendering from macrogame CSV outputs.

Each renderer reads the documented CSV schema, draws one matplotlib figure
and writes one image. Rendering is read-only over its inputs and
deterministic given the same inputs and library versions. Every renderer
returns a ``RenderResult`` reporting how many mean lines and epoch
separators were drawn so batch callers can verify style options took effect.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from .specs import FigureSpec, SchemaError

AGENT_TYPE_ORDER = ["household", "firm", "central_bank", "government"]

FIGURE_DPI = 120


@dataclass
class RenderResult:
    figure_id: str
    path: str
    mean_lines: int = 0
    epoch_separators: int = 0


def _load_csv(path: Path, required: list[str], role: str) -> pd.DataFrame:
    if not path.exists():
        raise SchemaError(f"{role}: input file not found: {path}")
    frame = pd.read_csv(path)
    if len(frame) == 0:
        raise SchemaError(f"{role}: {path} has an empty body")
    for column in required:
        if column not in frame.columns:
            raise SchemaError(f"{role}: {path} is missing column {column!r}")
    return frame


def _save(fig, output: str) -> None:
    out = Path(output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=FIGURE_DPI)
    plt.close(fig)


def render(spec: FigureSpec) -> RenderResult:
    """Render one figure spec to its output image."""
    try:
        renderer = _RENDERERS[spec.kind]
    except KeyError:
        raise SchemaError(f"unknown figure kind {spec.kind!r}") from None
    return renderer(spec)


# ----------------------------------------------------------------------
# training curves
# ----------------------------------------------------------------------


def _render_training_curves(spec: FigureSpec) -> RenderResult:
    frame = _load_csv(
        spec.input_path("curves"),
        ["scheme", "epoch", "episode", "agent_id", "agent_type",
         "discounted_return", "moving_avg"],
        "curves",
    )
    types = [t for t in AGENT_TYPE_ORDER if t in set(frame["agent_type"])]
    fig, axes = plt.subplots(
        1, len(types), figsize=(4.2 * len(types), 3.4), squeeze=False
    )
    mean_lines = 0
    separators = 0
    want_separators = spec.options.get("epoch_separators", True)
    for ax, agent_type in zip(axes[0], types):
        sub = frame[frame["agent_type"] == agent_type]
        # PSRO curves restart per epoch: index episodes globally in file order
        for agent_id, per_agent in sub.groupby("agent_id"):
            x = np.arange(len(per_agent))
            ax.plot(x, per_agent["discounted_return"], alpha=0.25, linewidth=0.7)
            ax.plot(x, per_agent["moving_avg"], linewidth=1.6, label=agent_id)
            mean_lines += 1
        if want_separators:
            epochs = sub.groupby("agent_id")["epoch"].apply(np.asarray)
            first = epochs.iloc[0]
            changes = np.nonzero(np.diff(first))[0]
            for change in changes:
                ax.axvline(change + 1, color="gray", linestyle="--", linewidth=0.8)
            separators += len(changes)
        ax.set_title(agent_type.replace("_", " "))
        ax.set_xlabel("episode")
        ax.legend(fontsize=6)
    axes[0][0].set_ylabel("discounted return")
    fig.tight_layout()
    _save(fig, spec.output)
    return RenderResult(spec.figure_id, spec.output, mean_lines, separators)


# ----------------------------------------------------------------------
# action / observation histograms
# ----------------------------------------------------------------------


def _render_histogram(spec: FigureSpec) -> RenderResult:
    column = spec.options["column"]
    agent_type = spec.options["agent_type"]
    frame = _load_csv(
        spec.input_path("logs"), ["agent_type", "agent_id", column], "logs"
    )
    sub = frame[frame["agent_type"] == agent_type]
    if len(sub) == 0:
        raise SchemaError(f"logs: no rows for agent type {agent_type!r}")
    fig, ax = plt.subplots(figsize=(4.6, 3.4))
    mean_lines = 0
    for (agent_id, values), color_index in zip(
        sub.groupby("agent_id")[column], range(10)
    ):
        series = pd.to_numeric(values, errors="coerce").dropna()
        color = f"C{color_index}"
        ax.hist(series, bins=20, alpha=0.45, label=agent_id, color=color)
        if spec.options.get("mean_lines", True):
            ax.axvline(series.mean(), color=color, linestyle="--", linewidth=1.4)
            mean_lines += 1
    ax.set_xlabel(spec.options.get("xlabel", column))
    ax.set_ylabel("quarters")
    ax.legend(fontsize=7)
    fig.tight_layout()
    _save(fig, spec.output)
    return RenderResult(spec.figure_id, spec.output, mean_lines, 0)


# ----------------------------------------------------------------------
# interest rate / inflation over time
# ----------------------------------------------------------------------


def _render_rate_inflation_timeseries(spec: FigureSpec) -> RenderResult:
    frame = _load_csv(
        spec.input_path("logs"),
        ["agent_type", "episode", "step", "rate_next", "inflation"],
        "logs",
    )
    cb = frame[frame["agent_type"] == "central_bank"].copy()
    if len(cb) == 0:
        raise SchemaError("logs: no central bank rows")
    cb["rate_next"] = pd.to_numeric(cb["rate_next"])
    cb["inflation"] = pd.to_numeric(cb["inflation"])
    fig, (ax_rate, ax_inflation) = plt.subplots(1, 2, figsize=(9.0, 3.4))
    mean_lines = 0
    for ax, column, label in (
        (ax_rate, "rate_next", "interest rate (next quarter)"),
        (ax_inflation, "inflation", "annual inflation"),
    ):
        for _, episode in cb.groupby("episode"):
            ax.plot(episode["step"], episode[column], color="C0", alpha=0.15,
                    linewidth=0.7)
        if spec.options.get("mean_lines", True):
            mean = cb.groupby("step")[column].mean()
            ax.plot(mean.index, mean.values, color="black", linewidth=1.8)
            mean_lines += 1
        ax.set_xlabel("quarter")
        ax.set_ylabel(label)
    fig.tight_layout()
    _save(fig, spec.output)
    return RenderResult(spec.figure_id, spec.output, mean_lines, 0)


def _render_rate_change_histogram(spec: FigureSpec) -> RenderResult:
    frame = _load_csv(
        spec.input_path("logs"), ["agent_type", "episode", "step", "rate_next"], "logs"
    )
    cb = frame[frame["agent_type"] == "central_bank"].copy()
    if len(cb) == 0:
        raise SchemaError("logs: no central bank rows")
    cb["rate_next"] = pd.to_numeric(cb["rate_next"])
    changes = []
    for _, episode in cb.groupby("episode"):
        ordered = episode.sort_values("step")["rate_next"].to_numpy()
        changes.extend(np.diff(ordered))
    changes = np.asarray(changes)
    fig, ax = plt.subplots(figsize=(4.6, 3.4))
    ax.hist(changes, bins=21, color="C0", alpha=0.8)
    mean_lines = 0
    if spec.options.get("mean_lines", True):
        ax.axvline(changes.mean(), color="black", linestyle="--", linewidth=1.4)
        mean_lines = 1
    ax.set_xlabel("change in interest rate between quarters")
    ax.set_ylabel("quarters")
    fig.tight_layout()
    _save(fig, spec.output)
    return RenderResult(spec.figure_id, spec.output, mean_lines, 0)


# ----------------------------------------------------------------------
# unilateral-deviation utility heatmap
# ----------------------------------------------------------------------


def _render_regret_heatmap(spec: FigureSpec) -> RenderResult:
    frame = _load_csv(
        spec.input_path("matrix"),
        ["scheme", "agent_type", "deviation", "utility", "base_utility"],
        "matrix",
    )
    frame["utility"] = pd.to_numeric(frame["utility"])
    schemes = sorted(frame["scheme"].unique())
    deviation_schemes = sorted({d.split("/")[0] for d in frame["deviation"]})
    types = [t for t in AGENT_TYPE_ORDER if t in set(frame["agent_type"])]
    fig, axes = plt.subplots(
        1, len(types), figsize=(3.4 * len(types), 3.2), squeeze=False
    )
    for ax, agent_type in zip(axes[0], types):
        sub = frame[frame["agent_type"] == agent_type]
        matrix = np.zeros((len(schemes), len(deviation_schemes)))
        for i, world in enumerate(schemes):
            world_rows = sub[sub["scheme"] == world]
            for j, target in enumerate(deviation_schemes):
                utilities = world_rows[
                    world_rows["deviation"].str.startswith(target + "/")
                ]["utility"]
                matrix[i, j] = utilities.max() if len(utilities) else np.nan
        image = ax.imshow(matrix, cmap="viridis")
        ax.set_xticks(range(len(deviation_schemes)), deviation_schemes, fontsize=7)
        ax.set_yticks(range(len(schemes)), schemes, fontsize=7)
        for i in range(len(schemes)):
            for j in range(len(deviation_schemes)):
                if np.isfinite(matrix[i, j]):
                    ax.text(j, i, f"{matrix[i, j]:.2f}", ha="center", va="center",
                            color="white", fontsize=7)
        ax.set_title(agent_type.replace("_", " "), fontsize=9)
        fig.colorbar(image, ax=ax, shrink=0.8)
    axes[0][0].set_ylabel("world follows scheme")
    fig.supxlabel("best deviation into scheme", fontsize=9)
    fig.tight_layout()
    _save(fig, spec.output)
    return RenderResult(spec.figure_id, spec.output, 0, 0)


_RENDERERS = {
    "training_curves": _render_training_curves,
    "histogram": _render_histogram,
    "rate_inflation_timeseries": _render_rate_inflation_timeseries,
    "rate_change_histogram": _render_rate_change_histogram,
    "regret_heatmap": _render_regret_heatmap,
}

KINDS = tuple(_RENDERERS)
