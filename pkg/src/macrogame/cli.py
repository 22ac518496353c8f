"""Command-line harness: experiment orchestration and artifact persistence.

Commands
--------
``train-imarl``   independent concurrent training; writes curves + checkpoints
``train-psro``    the full epoch loop; writes curves, per-epoch checkpoints,
                  the game export, the final profile and diagnostics
``evaluate``      plays test episodes with a saved profile; writes episode logs
``regret``        Table-style regret of two schemes against their union
``facts``         stylized-fact verdicts over an episode log
``export-game``   re-exports a saved empirical game

Every command writes a run manifest listing each output file with its SHA-256
hash. CSV bodies contain no timestamps, so reruns with identical config and
seed are byte-identical.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .egta import (
    PsroConfig,
    StrategyProfile,
    compute_regret,
    format_regret_table,
    make_econ_evaluator,
    run_psro_econ,
    save_game,
)
from .env.config import ConfigError, ScenarioConfig, load_config, scenario_from_dict
from .facts import check_law_of_demand, check_rate_inflation_relation
from .logs import (
    deviation_matrix_rows,
    episode_rows,
    read_episode_log,
    regret_rows,
    write_curves,
    write_deviation_matrix,
    write_episode_log,
    write_regret_report,
    write_utility_tensor,
)
from .policy import AGENT_TYPES, load_policy, save_policy
from .ppo import (
    IMARL_LEARNING_RATES,
    PSRO_LEARNING_RATES,
    TrainConfig,
    derive_seed,
    econ_wiring,
    play_episode,
    train_imarl,
)


def default_config_path() -> Path:
    return Path(resources.files("macrogame") / "configs" / "default.yaml")


# ----------------------------------------------------------------------
# config assembly
# ----------------------------------------------------------------------


def _train_config_from(
    data: dict, scheme: str, seed: int | None
) -> TrainConfig:
    section = dict(data.get("training", {}))
    rates_by_scheme = section.pop("learning_rates", {})
    defaults = PSRO_LEARNING_RATES if scheme == "psro" else IMARL_LEARNING_RATES
    rates = dict(defaults)
    rates.update(rates_by_scheme.get(scheme, {}))
    known = {
        "episodes", "clip_epsilon", "gae_lambda", "epochs_per_batch",
        "minibatch_size", "entropy_coef", "value_coef", "episodes_per_batch",
        "optimizer", "hidden", "seed",
    }
    unknown = set(section) - known
    if unknown:
        raise ConfigError(f"training: unknown keys {sorted(unknown)}")
    if "hidden" in section:
        section["hidden"] = tuple(section["hidden"])
    config = TrainConfig(learning_rates=rates, **section)
    if seed is not None:
        config.seed = seed
    return config


def _psro_config_from(data: dict, seed: int | None) -> PsroConfig:
    section = dict(data.get("psro", {}))
    solver = dict(section.pop("meta_solver", {}))
    known_solver = {
        "iterations", "step_size", "restarts", "regret_tolerance",
        "check_every", "exploration_floor", "polish", "seed",
    }
    unknown = set(solver) - known_solver
    if unknown:
        raise ConfigError(f"psro.meta_solver: unknown keys {sorted(unknown)}")
    known = {"epochs", "episodes_per_oracle", "runs_per_cell", "final_eval_runs", "seed"}
    unknown = set(section) - known
    if unknown:
        raise ConfigError(f"psro: unknown keys {sorted(unknown)}")
    from .egta import MetaSolverConfig

    config = PsroConfig(meta_solver=MetaSolverConfig(**solver), **section)
    if seed is not None:
        config.seed = seed
    return config


def _load_everything(args, scheme: str):
    path = Path(args.config) if args.config else default_config_path()
    data = load_config(path)
    if "scenario" not in data:
        raise ConfigError(f"{path}: missing required 'scenario' section")
    scenario = scenario_from_dict(data["scenario"])
    if args.seed is not None:
        scenario = ScenarioConfig(
            **{
                **{f: getattr(scenario, f) for f in (
                    "n_households", "n_firms", "household_params", "firm_params",
                    "cb_params", "gov_params", "action_grids", "norm", "horizon",
                    "normalized_rewards",
                )},
                "seed": args.seed,
            }
        )
    train_cfg = _train_config_from(data, scheme, args.seed)
    psro_cfg = _psro_config_from(data, args.seed)
    return path, scenario, train_cfg, psro_cfg


# ----------------------------------------------------------------------
# manifest
# ----------------------------------------------------------------------


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(
    out_dir: Path, command: str, config_path: Path | None, seed: int | None,
    started: float,
) -> None:
    outputs = []
    for file in sorted(out_dir.rglob("*")):
        if file.is_file() and file.name != "manifest.json":
            outputs.append(
                {
                    "path": str(file.relative_to(out_dir)),
                    "sha256": _sha256(file),
                    "bytes": file.stat().st_size,
                }
            )
    from .logs import SCHEMA_VERSION

    manifest = {
        "command": command,
        "tool_version": __version__,
        "csv_schema_version": SCHEMA_VERSION,
        "config": str(config_path) if config_path else None,
        "config_sha256": _sha256(config_path) if config_path else None,
        "seed": seed,
        "started_at": started,
        "finished_at": time.time(),
        "outputs": outputs,
    }
    with open(out_dir / "manifest.json", "w") as f:
        json.dump(manifest, f, indent=1, sort_keys=True)


# ----------------------------------------------------------------------
# strategy profile persistence
# ----------------------------------------------------------------------


def save_strategy_profile(
    out_dir: Path, scheme: str,
    strategies: dict[str, list], probs: dict[str, np.ndarray],
) -> dict:
    """Write checkpoints plus a profile.json naming them with hashes."""
    entry: dict = {"scheme": scheme, "strategies": {}, "probs": {}}
    for player in AGENT_TYPES:
        paths = []
        for k, params in enumerate(strategies[player]):
            rel = f"checkpoints/{player}_{k:02d}.policy"
            save_policy(params, out_dir / rel)
            paths.append(
                {"name": f"{scheme}/{player}/{k}", "path": rel,
                 "sha256": params.content_hash()}
            )
        entry["strategies"][player] = paths
        entry["probs"][player] = [float(p) for p in probs[player]]
    with open(out_dir / "profile.json", "w") as f:
        json.dump(entry, f, indent=1, sort_keys=True)
    return entry


def load_strategy_profile(run_dir: Path) -> tuple[str, StrategyProfile, dict[str, list]]:
    """Load a saved profile; returns (scheme, profile, named strategy lists)."""
    profile_path = run_dir / "profile.json"
    if not profile_path.exists():
        raise ConfigError(f"{run_dir}: no profile.json found")
    with open(profile_path) as f:
        entry = json.load(f)
    strategies: dict[str, list] = {}
    named: dict[str, list] = {}
    probs: dict[str, np.ndarray] = {}
    for player in AGENT_TYPES:
        strategies[player] = []
        named[player] = []
        for item in entry["strategies"][player]:
            params = load_policy(run_dir / item["path"])
            strategies[player].append(params)
            named[player].append((item["name"], params))
        probs[player] = np.asarray(entry["probs"][player], dtype=np.float64)
    profile = StrategyProfile(
        players=AGENT_TYPES, strategies=strategies, probs=probs
    )
    return entry["scheme"], profile, named


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------


def cmd_train_imarl(args) -> int:
    config_path, scenario, train_cfg, _ = _load_everything(args, "imarl")
    started = time.time()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    episodes = args.episodes or 4000
    policies, curves = train_imarl(scenario, train_cfg, episodes=episodes)
    write_curves(out_dir / "training_curves.csv", curves)
    save_strategy_profile(
        out_dir, "imarl",
        {p: [policies[p]] for p in AGENT_TYPES},
        {p: np.array([1.0]) for p in AGENT_TYPES},
    )
    write_manifest(out_dir, "train-imarl", config_path, train_cfg.seed, started)
    print(f"train-imarl: {episodes} episodes -> {out_dir}")
    return 0


def cmd_train_psro(args) -> int:
    config_path, scenario, train_cfg, psro_cfg = _load_everything(args, "psro")
    started = time.time()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.episodes:
        train_cfg.episodes = args.episodes
    else:
        train_cfg.episodes = psro_cfg.episodes_per_oracle
    if args.epochs:
        psro_cfg.epochs = args.epochs
    if args.runs:
        psro_cfg.runs_per_cell = args.runs

    diagnostics_rows = []

    def on_epoch(diag, game, profile):
        diagnostics_rows.append(
            {
                "epoch": diag.epoch,
                "sizes": dict(diag.strategy_set_sizes),
                "cells_evaluated": diag.cells_evaluated,
                "total_cells": diag.total_cells,
                "solver_regret": diag.solver_regret,
                "approximate": diag.approximate,
            }
        )
        # persist partial state every epoch for resumability
        save_strategy_profile(
            out_dir, "psro",
            {p: list(game.strategy_sets[p]) for p in AGENT_TYPES},
            {p: profile.probs[p] for p in AGENT_TYPES},
        )
        with open(out_dir / "diagnostics.json", "w") as f:
            json.dump(diagnostics_rows, f, indent=1, sort_keys=True)

    result = run_psro_econ(
        scenario, psro_cfg, train_cfg, on_epoch=on_epoch, jobs=args.jobs
    )
    write_curves(out_dir / "training_curves.csv", result.curves)
    manifest_entry = save_strategy_profile(
        out_dir, "psro",
        {p: list(result.game.strategy_sets[p]) for p in AGENT_TYPES},
        {p: result.profile.probs[p] for p in AGENT_TYPES},
    )
    save_game(
        result.game, out_dir / "game.json",
        strategy_manifest=manifest_entry["strategies"],
    )
    write_utility_tensor(out_dir / "utility_tensor.csv", "psro", result.game)
    with open(out_dir / "diagnostics.json", "w") as f:
        json.dump(diagnostics_rows, f, indent=1, sort_keys=True)
    write_manifest(out_dir, "train-psro", config_path, psro_cfg.seed, started)
    sizes = {p: len(result.game.strategy_sets[p]) for p in AGENT_TYPES}
    print(
        f"train-psro: {psro_cfg.epochs} epochs, strategy sets {sizes}, "
        f"solver regret {result.diagnostics[-1].solver_regret:.3g} -> {out_dir}"
    )
    return 0


def cmd_evaluate(args) -> int:
    config_path, scenario, train_cfg, _ = _load_everything(args, "imarl")
    started = time.time()
    run_dir = Path(args.run)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    scheme, profile, _ = load_strategy_profile(run_dir)
    episodes = args.episodes or 500
    wiring = econ_wiring(scenario, hidden=train_cfg.hidden)
    seed = args.seed if args.seed is not None else scenario.seed
    draw_rng = np.random.default_rng(derive_seed(seed, 0xD12A))

    def run_one(k: int):
        policies = {}
        for player in AGENT_TYPES:
            idx = int(draw_rng.choice(len(profile.probs[player]), p=profile.probs[player]))
            policies[player] = profile.strategies[player][idx]
        episode = play_episode(
            wiring, policies,
            episode_seed=derive_seed(seed, k, 0xE7A1),
            deterministic=args.deterministic,
        )
        return episode_rows(scheme, k, episode, scenario)

    rows: list[dict] = []
    for k in range(episodes):
        rows.extend(run_one(k))
    write_episode_log(out_dir / "episode_logs.csv", rows)
    write_manifest(out_dir, "evaluate", config_path, seed, started)
    print(f"evaluate: {episodes} episodes of {scheme} -> {out_dir}")
    return 0


def cmd_regret(args) -> int:
    config_path, scenario, train_cfg, psro_cfg = _load_everything(args, "psro")
    started = time.time()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    runs = args.runs or psro_cfg.final_eval_runs
    candidates: dict[str, StrategyProfile] = {}
    named_union: dict[str, list] = {p: [] for p in AGENT_TYPES}
    for run_dir in (args.imarl, args.psro):
        scheme, profile, named = load_strategy_profile(Path(run_dir))
        candidates[scheme] = profile
        for player in AGENT_TYPES:
            named_union[player].extend(named[player])
    evaluator = make_econ_evaluator(scenario, psro_cfg.seed, hidden=train_cfg.hidden)
    rows: list[dict] = []
    matrix_rows: list[dict] = []
    reports = {}
    for scheme, candidate in candidates.items():
        report = compute_regret(candidate, named_union, evaluator, runs=runs)
        reports[scheme] = report
        rows.extend(regret_rows(scheme, report))
        matrix_rows.extend(deviation_matrix_rows(scheme, report))
    write_regret_report(out_dir / "regret_report.csv", rows)
    write_deviation_matrix(out_dir / "deviation_matrix.csv", matrix_rows)
    table = format_regret_table(reports)
    (out_dir / "regret_report.txt").write_text(table + "\n")
    write_manifest(out_dir, "regret", config_path, psro_cfg.seed, started)
    print(table)
    return 0


def cmd_facts(args) -> int:
    started = time.time()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = read_episode_log(args.log)
    law = check_law_of_demand(rows)
    rate = check_rate_inflation_relation(rows, target_inflation=args.target_inflation)
    verdicts = {
        v.name: {"verdict": v.verdict, "statistic": v.statistic, "details": v.details}
        for v in (law, rate)
    }
    with open(out_dir / "facts.json", "w") as f:
        json.dump(verdicts, f, indent=1, sort_keys=True)
    write_manifest(out_dir, "facts", None, None, started)
    for v in (law, rate):
        stat = "n/a" if v.statistic is None else f"{v.statistic:.4g}"
        print(f"{v.name}: {v.verdict} (statistic={stat})")
    return 0


def cmd_export_game(args) -> int:
    started = time.time()
    src = Path(args.run) / "game.json"
    if not src.exists():
        raise ConfigError(f"{args.run}: no game.json found (run train-psro first)")
    with open(src) as f:
        game_data = json.load(f)  # validates JSON before re-export
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "game.json", "w") as f:
        json.dump(game_data, f, indent=1, sort_keys=True)
    write_manifest(out_dir, "export-game", None, None, started)
    print(f"export-game: {src} -> {out_dir / 'game.json'}")
    return 0


# ----------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="macrogame",
        description="Multi-agent economy: training, equilibrium analysis, regret.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", help="YAML config (default: packaged scenario)")
            p.add_argument("--seed", type=int, default=None)
        out_default = os.environ.get("OUT_DIR")
        p.add_argument(
            "--out", required=out_default is None, default=out_default,
            help="output directory (default: $OUT_DIR when set)",
        )

    p = sub.add_parser("train-imarl", help="independent concurrent training")
    common(p)
    p.add_argument("--episodes", type=int, default=None, help="default 4000")
    p.set_defaults(func=cmd_train_imarl)

    p = sub.add_parser("train-psro", help="policy-space best-response loop")
    common(p)
    p.add_argument("--episodes", type=int, default=None, help="episodes per oracle")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--runs", type=int, default=None, help="simulations per cell")
    p.add_argument("--jobs", type=int, default=1, help="parallel cell evaluations")
    p.set_defaults(func=cmd_train_psro)

    p = sub.add_parser("evaluate", help="play test episodes with a saved profile")
    common(p)
    p.add_argument("--run", required=True, help="training output directory")
    p.add_argument("--episodes", type=int, default=None, help="default 500")
    p.add_argument("--deterministic", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("regret", help="regret of two schemes against their union")
    common(p)
    p.add_argument("--imarl", required=True, help="train-imarl output directory")
    p.add_argument("--psro", required=True, help="train-psro output directory")
    p.add_argument("--runs", type=int, default=None, help="test episodes per utility")
    p.set_defaults(func=cmd_regret)

    p = sub.add_parser("facts", help="stylized-fact checks over an episode log")
    common(p, config=False)
    p.add_argument("--log", required=True, help="episode_logs.csv path")
    p.add_argument("--target-inflation", type=float, default=1.02)
    p.set_defaults(func=cmd_facts)

    p = sub.add_parser("export-game", help="re-export a saved empirical game")
    common(p, config=False)
    p.add_argument("--run", required=True, help="train-psro output directory")
    p.set_defaults(func=cmd_export_game)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # one-line machine-parsable failure
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
