"""Empirical game construction, Nash meta-solving, the PSRO outer loop and
regret analysis.

The empirical game is a dense n-player utility tensor indexed by one pure
strategy per player; cells are filled by Monte Carlo evaluation with a seed
schedule keyed by the strategy contents, so re-evaluating the same joint
profile with the same run count reproduces identical utilities regardless of
evaluation order or parallelism.

The meta-solver runs projected replicator dynamics from random restarts,
tracking both iterates and their running averages, and keeps whichever
candidate has the smallest enumeration-checked regret; a derivative-free
polish stage refines the best candidate when the tolerance is not yet met.

The PSRO driver is generic over an oracle (new-strategy generator) and an
evaluator so that stub games exercise the same loop as the full economy.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .env.config import ScenarioConfig
from .policy import AGENT_TYPES, PolicyParams
from .ppo import (
    CurvePoint,
    OpponentSampler,
    TrainConfig,
    derive_seed,
    econ_wiring,
    play_episode,
    train_best_response,
)

Evaluator = Callable[[tuple, int], np.ndarray]

_CELL_STREAM_TAG = 0xCE11


# ----------------------------------------------------------------------
# empirical game
# ----------------------------------------------------------------------


@dataclass
class EmpiricalGame:
    """Dense normal-form game over per-player pure-strategy sets."""

    players: tuple[str, ...]
    strategy_sets: dict[str, list]
    utilities: np.ndarray          # shape sizes + (n_players,), NaN = pending
    evaluated: np.ndarray          # bool, shape sizes
    runs_per_cell: int
    eval_count: int = 0            # cells evaluated over the game's lifetime
    strategy_names: dict[str, list[str]] = field(default_factory=dict)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(self.strategy_sets[p]) for p in self.players)

    def require_complete(self) -> np.ndarray:
        if not bool(self.evaluated.all()):
            raise ValueError("empirical game has pending cells")
        if not np.all(np.isfinite(self.utilities)):
            raise ValueError("evaluated cells must carry finite utilities")
        return self.utilities

    def cell_strategies(self, cell: tuple[int, ...]) -> tuple:
        return tuple(
            self.strategy_sets[p][cell[i]] for i, p in enumerate(self.players)
        )


def new_empirical_game(
    players: tuple[str, ...],
    initial_strategies: dict[str, object],
    evaluator: Evaluator,
    runs_per_cell: int,
    strategy_names: dict[str, list[str]] | None = None,
) -> EmpiricalGame:
    """Singleton strategy sets per player; evaluates the one initial cell."""
    n = len(players)
    game = EmpiricalGame(
        players=tuple(players),
        strategy_sets={p: [initial_strategies[p]] for p in players},
        utilities=np.full((1,) * n + (n,), np.nan),
        evaluated=np.zeros((1,) * n, dtype=bool),
        runs_per_cell=runs_per_cell,
        strategy_names=strategy_names
        or {p: [f"{p}/0"] for p in players},
    )
    cell = (0,) * n
    game.utilities[cell] = evaluator(game.cell_strategies(cell), runs_per_cell)
    game.evaluated[cell] = True
    game.eval_count += 1
    return game


def expand_empirical_game(
    game: EmpiricalGame,
    new_strategies: dict[str, object],
    evaluator: Evaluator,
    new_names: dict[str, str] | None = None,
    map_fn=map,
) -> int:
    """Append one strategy per listed player and evaluate exactly the cells
    that involve at least one new strategy. Returns the number of cells
    evaluated; existing cells are never touched.

    ``map_fn`` may be a work pool's map; cell results are independent of
    evaluation order because episode seeds derive from strategy contents.
    """
    if not new_strategies:
        return 0
    old_sizes = game.sizes
    for i, player in enumerate(game.players):
        if player in new_strategies:
            game.strategy_sets[player].append(new_strategies[player])
            name = (new_names or {}).get(
                player, f"{player}/{len(game.strategy_sets[player]) - 1}"
            )
            game.strategy_names[player].append(name)
    new_sizes = game.sizes
    n = len(game.players)

    utilities = np.full(new_sizes + (n,), np.nan)
    evaluated = np.zeros(new_sizes, dtype=bool)
    old_block = tuple(slice(0, s) for s in old_sizes)
    utilities[old_block] = game.utilities
    evaluated[old_block] = game.evaluated
    game.utilities = utilities
    game.evaluated = evaluated

    pending = [cell for cell in np.ndindex(*new_sizes) if not game.evaluated[cell]]
    results = map_fn(
        lambda cell: evaluator(game.cell_strategies(cell), game.runs_per_cell),
        pending,
    )
    for cell, value in zip(pending, results):
        game.utilities[cell] = value
        game.evaluated[cell] = True
    game.eval_count += len(pending)
    return len(pending)


# ----------------------------------------------------------------------
# mixed strategies and expected utilities
# ----------------------------------------------------------------------


@dataclass
class MixedStrategyProfile:
    """Per-player probability distribution over that player's strategy set."""

    probs: dict[str, np.ndarray]

    def __post_init__(self):
        for player, p in self.probs.items():
            p = np.asarray(p, dtype=np.float64)
            if np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-9:
                raise ValueError(
                    f"{player}: mixture must be a probability vector, got {p}"
                )
            self.probs[player] = np.clip(p, 0.0, None)

    @classmethod
    def degenerate(cls, players, sizes, index=0) -> "MixedStrategyProfile":
        probs = {}
        for player, size in zip(players, sizes):
            p = np.zeros(size)
            p[index] = 1.0
            probs[player] = p
        return cls(probs)


def _deviation_payoffs(
    tensor: np.ndarray, probs: list[np.ndarray], player: int
) -> np.ndarray:
    """Expected payoff to ``player`` of each of its pure strategies, under the
    other players' mixtures."""
    u = tensor[..., player]
    # contract trailing axes first so earlier axis indices stay valid
    for axis in reversed(range(len(probs))):
        if axis == player:
            continue
        u = np.tensordot(u, probs[axis], axes=([axis], [0]))
    return u


def expected_utility(
    game: EmpiricalGame, profile: MixedStrategyProfile, player: str
) -> float:
    """Probability-weighted utility over all joint pure profiles."""
    tensor = game.require_complete()
    probs = [profile.probs[p] for p in game.players]
    i = game.players.index(player)
    return float(probs[i] @ _deviation_payoffs(tensor, probs, i))


def profile_regrets(tensor: np.ndarray, probs: list[np.ndarray]) -> np.ndarray:
    """Per-player gain of the best pure deviation inside the game (>= 0)."""
    n = tensor.shape[-1]
    regrets = np.zeros(n)
    for i in range(n):
        devs = _deviation_payoffs(tensor, probs, i)
        regrets[i] = devs.max() - probs[i] @ devs
    return np.maximum(regrets, 0.0)


# ----------------------------------------------------------------------
# Nash meta-solver: projected replicator dynamics with candidate tracking
# ----------------------------------------------------------------------


@dataclass
class MetaSolverConfig:
    iterations: int = 10_000
    step_size: float = 1e-2
    restarts: int = 20
    regret_tolerance: float = 1e-3
    check_every: int = 50
    exploration_floor: float = 1e-8
    polish: bool = True
    seed: int = 0


@dataclass
class NashResult:
    profile: MixedStrategyProfile
    regret: float
    approximate: bool   # True when the tolerance was not met


def _project_simplex(x: np.ndarray, floor: float = 0.0) -> np.ndarray:
    """Euclidean projection onto the simplex {p >= floor, sum p = 1}."""
    k = len(x)
    budget = 1.0 - k * floor
    y = x - floor
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - budget
    rho = np.nonzero(u * np.arange(1, k + 1) > css)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(y - theta, 0.0) + floor


def solve_nash(
    game: EmpiricalGame, config: MetaSolverConfig | None = None
) -> NashResult:
    """Approximate Nash equilibrium of the (fully evaluated) empirical game.

    Candidates come from every pure profile, the uniform profile, projected
    replicator dynamics iterates and their running averages over random
    restarts; a derivative-free polish of the most promising candidates runs
    between restarts. The candidate with the smallest exhaustively checked
    regret wins; the result is flagged approximate when even the best
    candidate misses the tolerance.
    """
    config = config or MetaSolverConfig()
    tensor = game.require_complete()
    sizes = game.sizes
    n = len(game.players)

    best_regret = math.inf
    best: list[np.ndarray] | None = None
    pool: list[tuple[float, list[np.ndarray]]] = []  # top candidates for polish

    def consider(probs: list[np.ndarray]) -> float:
        nonlocal best_regret, best
        regret = float(profile_regrets(tensor, probs).sum())
        if regret < best_regret:
            best_regret = regret
            best = [p.copy() for p in probs]
        if len(pool) < 6 or regret < pool[-1][0]:
            pool.append((regret, [p.copy() for p in probs]))
            pool.sort(key=lambda item: item[0])
            del pool[6:]
        return regret

    def polish_pool(rng: np.random.Generator) -> None:
        if not config.polish:
            return
        starts = [probs for _, probs in pool[:3]]
        starts.append([rng.dirichlet(np.ones(s)) for s in sizes])
        for start in starts:
            refined = _polish(tensor, start, config)
            if refined is not None:
                consider(refined)
            if best_regret <= config.regret_tolerance:
                return

    # pure profiles and the uniform profile
    for cell in np.ndindex(*sizes):
        probs = []
        for i, k in enumerate(cell):
            p = np.zeros(sizes[i])
            p[k] = 1.0
            probs.append(p)
        consider(probs)
    consider([np.full(s, 1.0 / s) for s in sizes])

    rng = np.random.default_rng(derive_seed(config.seed, 0x9A5B))
    for restart in range(config.restarts):
        if best_regret <= config.regret_tolerance:
            break
        if restart == 0:
            x = [np.full(s, 1.0 / s) for s in sizes]
        else:
            x = [rng.dirichlet(np.ones(s)) for s in sizes]
        cumulative = [p.copy() for p in x]
        for it in range(config.iterations):
            devs = [_deviation_payoffs(tensor, x, i) for i in range(n)]
            for i in range(n):
                growth = x[i] * (devs[i] - x[i] @ devs[i])
                x[i] = _project_simplex(
                    x[i] + config.step_size * growth, config.exploration_floor
                )
                cumulative[i] += x[i]
            if (it + 1) % config.check_every == 0:
                consider(x)
                consider([c / c.sum() for c in cumulative])
                if best_regret <= config.regret_tolerance:
                    break
        consider(x)
        consider([c / c.sum() for c in cumulative])
        polish_pool(rng)

    if best_regret > config.regret_tolerance:
        polish_pool(rng)

    profile = MixedStrategyProfile(
        {p: best[i] for i, p in enumerate(game.players)}
    )
    return NashResult(
        profile=profile,
        regret=best_regret,
        approximate=best_regret > config.regret_tolerance,
    )


def _polish(
    tensor: np.ndarray, start: list[np.ndarray], config: MetaSolverConfig
) -> list[np.ndarray] | None:
    """Derivative-free local refinement of the total-regret objective in
    softmax coordinates."""
    try:
        from scipy.optimize import minimize
    except ImportError:  # pragma: no cover
        return None
    sizes = [len(p) for p in start]
    splits = np.cumsum(sizes)[:-1]

    def unpack(z: np.ndarray) -> list[np.ndarray]:
        probs = []
        for chunk in np.split(z, splits):
            shifted = chunk - chunk.max()
            e = np.exp(shifted)
            probs.append(e / e.sum())
        return probs

    def objective(z: np.ndarray) -> float:
        return float(profile_regrets(tensor, unpack(z)).sum())

    z = np.concatenate([np.log(np.maximum(p, 1e-12)) for p in start])
    # restart the simplex search once from its own endpoint: on this
    # piecewise-smooth objective a fresh simplex escapes premature stalls
    for _ in range(2):
        result = minimize(
            objective, z, method="Nelder-Mead",
            options={"maxiter": 2000, "xatol": 1e-10, "fatol": 1e-13},
        )
        z = result.x
        if result.fun <= 1e-10:
            break
    return unpack(z)


# ----------------------------------------------------------------------
# PSRO outer loop (generic over oracle and evaluator)
# ----------------------------------------------------------------------


@dataclass
class PsroConfig:
    epochs: int = 8
    episodes_per_oracle: int = 100
    runs_per_cell: int = 10
    final_eval_runs: int = 100
    meta_solver: MetaSolverConfig = field(default_factory=MetaSolverConfig)
    seed: int = 0

    def __post_init__(self):
        if min(
            self.epochs, self.episodes_per_oracle, self.runs_per_cell,
            self.final_eval_runs,
        ) < 1:
            raise ValueError("all PSRO counts must be positive")


@dataclass
class EpochDiagnostics:
    epoch: int
    strategy_set_sizes: dict[str, int]
    cells_evaluated: int
    total_cells: int
    solver_regret: float
    approximate: bool


@dataclass
class PsroResult:
    game: EmpiricalGame
    profile: MixedStrategyProfile
    diagnostics: list[EpochDiagnostics]
    curves: list[CurvePoint] = field(default_factory=list)


def opponent_sampler_for(
    game: EmpiricalGame, profile: MixedStrategyProfile, player: str
) -> OpponentSampler:
    """The meta-strategy over every other player's current strategy set."""
    others = [p for p in game.players if p != player]
    return OpponentSampler(
        strategies={p: list(game.strategy_sets[p]) for p in others},
        probs={p: profile.probs[p].copy() for p in others},
    )


def run_psro(
    players: tuple[str, ...],
    initial_strategies: dict[str, object],
    oracle: Callable[[str, OpponentSampler, int], object],
    evaluator: Evaluator,
    config: PsroConfig,
    on_epoch: Callable[[EpochDiagnostics, EmpiricalGame, MixedStrategyProfile], None]
    | None = None,
    map_fn=map,
) -> PsroResult:
    """The PSRO epoch loop.

    Starts from singleton strategy sets, then each epoch trains one new
    strategy per player against the current meta-strategy of the others,
    evaluates exactly the new cells, and re-solves the empirical game for an
    approximate Nash equilibrium that becomes the next meta-strategy.
    """
    game = new_empirical_game(players, initial_strategies, evaluator, config.runs_per_cell)
    profile = MixedStrategyProfile.degenerate(players, game.sizes)
    diagnostics: list[EpochDiagnostics] = []
    for epoch in range(1, config.epochs + 1):
        new_strategies = {}
        for player in players:
            opponents = opponent_sampler_for(game, profile, player)
            new_strategies[player] = oracle(player, opponents, epoch)
        newly = expand_empirical_game(game, new_strategies, evaluator, map_fn=map_fn)
        result = solve_nash(game, config.meta_solver)
        profile = result.profile
        diag = EpochDiagnostics(
            epoch=epoch,
            strategy_set_sizes={p: len(game.strategy_sets[p]) for p in players},
            cells_evaluated=newly,
            total_cells=int(np.prod(game.sizes)),
            solver_regret=result.regret,
            approximate=result.approximate,
        )
        diagnostics.append(diag)
        if on_epoch is not None:
            on_epoch(diag, game, profile)
    return PsroResult(game=game, profile=profile, diagnostics=diagnostics)


# ----------------------------------------------------------------------
# economy wiring
# ----------------------------------------------------------------------


def _strategy_key(strategy) -> int:
    """Stable identity of a strategy, for seed schedules and caching."""
    from .ppo import stable_hash

    if isinstance(strategy, PolicyParams):
        return int(strategy.content_hash()[:16], 16)
    if isinstance(strategy, (int, np.integer)):
        return int(strategy)
    return stable_hash(repr(strategy))


def estimate_utilities_wired(
    wiring,
    profile_strategies: tuple,
    runs: int,
    base_seed: int = 0,
) -> np.ndarray:
    """Mean per-player discounted return over ``runs`` episodes of one joint
    pure-strategy profile; a player's utility averages over the agents its
    policy controls.

    Episode seeds derive from the strategy contents, so the same joint
    profile always replays the same episodes regardless of evaluation order.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    players = wiring.players
    policies = dict(zip(players, profile_strategies))
    keys = [_strategy_key(s) for s in profile_strategies]
    totals = np.zeros(len(players))
    for run in range(runs):
        seed = derive_seed(base_seed, *keys, run, _CELL_STREAM_TAG)
        episode = play_episode(wiring, policies, seed)
        for i, player in enumerate(players):
            agent_returns = [episode.returns[a] for a in wiring.agent_ids[player]]
            totals[i] += float(np.mean(agent_returns))
    return totals / runs


def estimate_utilities(
    profile_strategies: tuple,
    env_config: ScenarioConfig,
    runs: int,
    base_seed: int = 0,
    hidden: tuple[int, ...] = (64, 64),
) -> np.ndarray:
    """Per-type utilities of one joint pure-strategy profile on the economy."""
    wiring = econ_wiring(env_config, hidden=hidden)
    return estimate_utilities_wired(wiring, profile_strategies, runs, base_seed)


def make_econ_evaluator(
    env_config: ScenarioConfig, base_seed: int, hidden: tuple[int, ...] = (64, 64)
) -> Evaluator:
    cache: dict[tuple[int, ...], np.ndarray] = {}

    def evaluator(profile_strategies: tuple, runs: int) -> np.ndarray:
        key = tuple(_strategy_key(s) for s in profile_strategies) + (runs,)
        if key not in cache:
            cache[key] = estimate_utilities(
                profile_strategies, env_config, runs, base_seed, hidden
            )
        return cache[key].copy()

    return evaluator


def run_psro_econ(
    env_config: ScenarioConfig,
    psro_config: PsroConfig,
    train_config: TrainConfig,
    on_epoch: Callable[[EpochDiagnostics, EmpiricalGame, MixedStrategyProfile], None]
    | None = None,
    jobs: int = 1,
) -> PsroResult:
    """PSRO on the economy: the oracle is the policy-gradient best response,
    strategies are policy checkpoints, utilities are mean discounted
    normalized returns per agent type."""
    from .policy import init_policy
    from .ppo import stable_hash

    wiring = econ_wiring(env_config, hidden=train_config.hidden)
    curves: list[CurvePoint] = []

    def oracle(player: str, opponents: OpponentSampler, epoch: int):
        params, oracle_curves = train_best_response(
            player, opponents, env_config, train_config, scheme="psro", epoch=epoch
        )
        curves.extend(oracle_curves)
        return params

    initial = {
        player: init_policy(
            wiring.specs[player], derive_seed(psro_config.seed, stable_hash(player), 0)
        )
        for player in AGENT_TYPES
    }
    evaluator = make_econ_evaluator(
        env_config, psro_config.seed, hidden=train_config.hidden
    )
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            result = run_psro(
                AGENT_TYPES, initial, oracle, evaluator, psro_config,
                on_epoch=on_epoch, map_fn=lambda f, items: list(pool.map(f, items)),
            )
    else:
        result = run_psro(
            AGENT_TYPES, initial, oracle, evaluator, psro_config, on_epoch=on_epoch
        )
    result.curves = curves
    return result


# ----------------------------------------------------------------------
# regret against a deviation set
# ----------------------------------------------------------------------


@dataclass
class StrategyProfile:
    """A (possibly mixed) joint strategy with its supporting strategies."""

    players: tuple[str, ...]
    strategies: dict[str, list]
    probs: dict[str, np.ndarray]

    def __post_init__(self):
        for player in self.players:
            p = np.asarray(self.probs[player], dtype=np.float64)
            if len(p) != len(self.strategies[player]):
                raise ValueError(f"{player}: probabilities misaligned with support")
            if np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-9:
                raise ValueError(f"{player}: mixture must be a probability vector")
            self.probs[player] = np.clip(p, 0.0, None)

    @classmethod
    def pure(cls, players, strategies: dict[str, object]) -> "StrategyProfile":
        return cls(
            players=tuple(players),
            strategies={p: [strategies[p]] for p in players},
            probs={p: np.array([1.0]) for p in players},
        )

    @classmethod
    def from_mixed(
        cls, game: EmpiricalGame, profile: MixedStrategyProfile
    ) -> "StrategyProfile":
        return cls(
            players=game.players,
            strategies={p: list(game.strategy_sets[p]) for p in game.players},
            probs={p: profile.probs[p].copy() for p in game.players},
        )


@dataclass
class RegretEntry:
    player: str
    base_utility: float
    regret: float                      # clamped at zero
    percentage: float | None           # None marks an undefined ratio
    best_deviation: str
    deviation_utilities: dict[str, float]


@dataclass
class RegretReport:
    entries: dict[str, RegretEntry]
    total_regret: float
    total_utility: float
    total_percentage: float | None


_UNDEFINED_EPS = 1e-9


def compute_regret(
    candidate: StrategyProfile,
    deviation_sets: dict[str, list[tuple[str, object]]],
    evaluator: Evaluator,
    runs: int = 100,
) -> RegretReport:
    """Best unilateral deviation gain per player, clamped at zero.

    For every player, the utility of each named deviation strategy against
    the candidate's opponent mixture is computed by enumerating the opponents'
    support cells; the candidate's own utility uses its full support. The
    percentage form divides by the candidate utility and is marked undefined
    when that utility is within ``1e-9`` of zero.
    """
    players = candidate.players
    cache: dict[tuple[int, ...], np.ndarray] = {}

    def cell_value(strategies: tuple) -> np.ndarray:
        key = tuple(_strategy_key(s) for s in strategies)
        if key not in cache:
            cache[key] = np.asarray(evaluator(strategies, runs), dtype=np.float64)
        return cache[key]

    def mixture_utility(player_index: int, own: list[tuple[object, float]]) -> float:
        """U_i when player i mixes over ``own`` and others follow candidate."""
        total = 0.0
        others = [j for j in range(len(players)) if j != player_index]
        support = [
            list(zip(candidate.strategies[players[j]], candidate.probs[players[j]]))
            for j in others
        ]
        for own_strategy, own_prob in own:
            if own_prob == 0.0:
                continue
            for combo in _product(support):
                weight = own_prob
                cell = [None] * len(players)
                cell[player_index] = own_strategy
                for j, (strategy, prob) in zip(others, combo):
                    if prob == 0.0:
                        weight = 0.0
                        break
                    cell[j] = strategy
                    weight *= prob
                if weight == 0.0:
                    continue
                total += weight * cell_value(tuple(cell))[player_index]
        return total

    entries: dict[str, RegretEntry] = {}
    total_regret = 0.0
    total_utility = 0.0
    for i, player in enumerate(players):
        own_support = list(zip(candidate.strategies[player], candidate.probs[player]))
        base = mixture_utility(i, own_support)
        deviation_utilities: dict[str, float] = {}
        for name, strategy in deviation_sets[player]:
            deviation_utilities[name] = mixture_utility(i, [(strategy, 1.0)])
        best_name = max(deviation_utilities, key=deviation_utilities.get)
        gain = deviation_utilities[best_name] - base
        regret = max(gain, 0.0)
        percentage = (
            regret / base if abs(base) > _UNDEFINED_EPS else None
        )
        entries[player] = RegretEntry(
            player=player,
            base_utility=base,
            regret=regret,
            percentage=percentage,
            best_deviation=best_name,
            deviation_utilities=deviation_utilities,
        )
        total_regret += regret
        total_utility += base
    total_percentage = (
        total_regret / total_utility if abs(total_utility) > _UNDEFINED_EPS else None
    )
    return RegretReport(
        entries=entries,
        total_regret=total_regret,
        total_utility=total_utility,
        total_percentage=total_percentage,
    )


def _product(pools: list[list]) -> list[tuple]:
    return list(itertools.product(*pools))


# ----------------------------------------------------------------------
# exports
# ----------------------------------------------------------------------


def game_to_dict(
    game: EmpiricalGame, strategy_manifest: dict[str, list[dict]] | None = None
) -> dict:
    """Structured export: strategy manifests plus the full utility tensor in
    long form (one record per cell per player)."""
    tensor = game.require_complete()
    cells = []
    for cell in np.ndindex(*game.sizes):
        for i, player in enumerate(game.players):
            cells.append(
                {
                    "cell": list(cell),
                    "player": player,
                    "utility": float(tensor[cell + (i,)]),
                }
            )
    manifest = strategy_manifest or {
        p: [{"name": name} for name in game.strategy_names[p]]
        for p in game.players
    }
    return {
        "players": list(game.players),
        "sizes": list(game.sizes),
        "runs_per_cell": game.runs_per_cell,
        "strategies": manifest,
        "utilities": cells,
    }


def save_game(game: EmpiricalGame, path: str | Path, **kwargs) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(game_to_dict(game, **kwargs), f, indent=1, sort_keys=True)


def format_regret_table(reports: dict[str, RegretReport]) -> str:
    """Render regret reports as one row per scheme with per-type columns
    ``absolute (percentage%)`` and a total column."""
    columns = ["Household", "Firm", "Central Bank", "Government", "Total"]
    keys = ["household", "firm", "central_bank", "government"]

    def fmt(regret: float, pct: float | None) -> str:
        pct_text = "undefined" if pct is None else f"{100 * pct:.2f}%"
        return f"{regret:.2f} ({pct_text})"

    rows = []
    header = ["Scheme"] + columns
    for scheme, report in reports.items():
        row = [scheme]
        for key in keys:
            entry = report.entries[key]
            row.append(fmt(entry.regret, entry.percentage))
        row.append(fmt(report.total_regret, report.total_percentage))
        rows.append(row)
    widths = [max(len(r[c]) for r in [header] + rows) for c in range(len(header))]
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(header, widths)),
        "  ".join("-" * w for w in widths),
    ]
    for row in rows:
        lines.append("  ".join(v.ljust(w) for v, w in zip(row, widths)))
    return "\n".join(lines)
