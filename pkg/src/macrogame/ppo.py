"""Clipped-surrogate policy-gradient trainer and best-response oracles.

The trainer is self-contained: rollouts are collected from environment
episodes, advantages come from generalized advantage estimation inside each
episode segment, and updates minimize the clipped surrogate plus a value
regression term minus an entropy bonus, over several shuffled minibatch
passes per batch.

Two training drivers share the machinery:

* ``train_oracle`` / ``train_best_response``: one learner updates while every
  opponent is frozen, drawn per episode from a mixed strategy (the PSRO inner
  loop);
* ``train_imarl``: all agent-type policies update concurrently from one
  shared episode stream (the independent-learning baseline).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .agents import agent_ids_by_type, build_policy_specs, hetero_features, policy_input
from .env.config import ScenarioConfig
from .env.environment import EconomyEnv, agent_type, episode_return
from .policy import (
    AGENT_TYPES,
    PolicyParams,
    PolicySpec,
    act,
    evaluate_batch,
    evaluate_batch_grad,
    init_policy,
)

# learning rates per agent type, per training scheme
PSRO_LEARNING_RATES = {
    "household": 2e-3,
    "firm": 2e-3,
    "central_bank": 2e-3,
    "government": 5e-3,
}
IMARL_LEARNING_RATES = {
    "household": 2e-3,
    "firm": 5e-3,
    "central_bank": 5e-3,
    "government": 1e-2,
}
# searched grid for per-scenario rate selection; exposed, not automated
LEARNING_RATE_GRID = (1e-3, 2e-3, 5e-3, 1e-2)

MOVING_AVG_WINDOW = 20

_ACTION_STREAM_TAG = 0xAC7
_OPPONENT_STREAM_TAG = 0x0BB
_MASK = 0xFFFFFFFFFFFFFFFF


def derive_seed(*parts: int) -> int:
    """Deterministic 64-bit seed from integer parts (order-sensitive)."""
    entropy = [int(p) & _MASK for p in parts]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def stable_hash(text: str) -> int:
    """Process-independent 64-bit hash of a string (unlike built-in hash)."""
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "little")


@dataclass
class TrainConfig:
    """Hyperparameters of the policy-gradient oracle."""

    learning_rates: dict[str, float] = field(
        default_factory=lambda: dict(PSRO_LEARNING_RATES)
    )
    episodes: int = 100
    clip_epsilon: float = 0.2
    gae_lambda: float = 0.95
    epochs_per_batch: int = 4
    minibatch_size: int = 256
    entropy_coef: float = 0.01
    value_coef: float = 0.5
    episodes_per_batch: int = 10
    optimizer: str = "adam"
    hidden: tuple[int, ...] = (64, 64)
    seed: int = 0

    def __post_init__(self):
        if any(lr < 0 for lr in self.learning_rates.values()):
            raise ValueError("learning rates must be nonnegative")
        if not (0.0 < self.clip_epsilon < 1.0 or math.isinf(self.clip_epsilon)):
            raise ValueError(
                f"clip_epsilon must lie in (0, 1) (or inf to disable clipping), "
                f"got {self.clip_epsilon}"
            )
        if not 0.0 <= self.gae_lambda <= 1.0:
            raise ValueError(f"gae_lambda must lie in [0, 1], got {self.gae_lambda}")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.episodes < 1 or self.episodes_per_batch < 1:
            raise ValueError("episode counts must be positive")


@dataclass
class RolloutBatch:
    """Flattened transitions for one learner over a group of episodes."""

    inputs: np.ndarray          # (N, input_dim)
    actions: np.ndarray         # (N, heads)
    log_probs: np.ndarray       # (N,) at collection time
    values: np.ndarray          # (N,) at collection time
    rewards: np.ndarray         # (N,)
    segment_lengths: np.ndarray  # per (agent, episode) trajectory segment

    def __post_init__(self):
        n = len(self.inputs)
        if not (
            len(self.actions) == len(self.log_probs) == len(self.values)
            == len(self.rewards) == n
        ):
            raise ValueError("misaligned rollout arrays")
        if self.segment_lengths.sum() != n:
            raise ValueError("segment lengths must cover the batch exactly")


@dataclass
class OpponentSampler:
    """Pure-strategy sets and mixing probabilities for every other player."""

    strategies: dict[str, list]
    probs: dict[str, np.ndarray]

    def __post_init__(self):
        for player, p in self.probs.items():
            p = np.asarray(p, dtype=np.float64)
            if len(p) != len(self.strategies[player]):
                raise ValueError(f"{player}: probabilities misaligned with strategies")
            if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
                raise ValueError(f"{player}: probabilities must form a distribution")
            self.probs[player] = p

    def sample(self, rng: np.random.Generator) -> dict:
        draw = {}
        for player in sorted(self.strategies):
            p = self.probs[player]
            idx = int(rng.choice(len(p), p=p))
            draw[player] = self.strategies[player][idx]
        return draw


# ----------------------------------------------------------------------
# generalized advantage estimation
# ----------------------------------------------------------------------


def compute_advantages(
    rewards: np.ndarray,
    values: np.ndarray,
    discount: float,
    gae_lambda: float,
    segment_lengths: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """GAE within each episode segment; terminal value is zero.

    Returns raw (unstandardized) advantages and value targets
    ``returns = advantages + values``.
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    advantages = np.zeros_like(rewards)
    start = 0
    for length in np.asarray(segment_lengths, dtype=np.int64):
        end = start + length
        running = 0.0
        for t in range(end - 1, start - 1, -1):
            next_value = values[t + 1] if t + 1 < end else 0.0
            delta = rewards[t] + discount * next_value - values[t]
            running = delta + discount * gae_lambda * running
            advantages[t] = running
        start = end
    return advantages, advantages + values


# ----------------------------------------------------------------------
# optimizers
# ----------------------------------------------------------------------


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, n: int) -> "AdamState":
        return cls(m=np.zeros(n), v=np.zeros(n))


def adam_step(
    flat: np.ndarray, grad: np.ndarray, state: AdamState, lr: float,
    beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8,
) -> np.ndarray:
    state.t += 1
    state.m = beta1 * state.m + (1 - beta1) * grad
    state.v = beta2 * state.v + (1 - beta2) * grad**2
    m_hat = state.m / (1 - beta1**state.t)
    v_hat = state.v / (1 - beta2**state.t)
    return flat - lr * m_hat / (np.sqrt(v_hat) + eps)


# ----------------------------------------------------------------------
# clipped-surrogate update
# ----------------------------------------------------------------------


def ppo_loss_terms(
    params: PolicyParams, batch: RolloutBatch, advantages: np.ndarray,
    returns: np.ndarray, clip_epsilon: float,
) -> dict[str, float]:
    """Loss components on the full batch (diagnostics; no gradient)."""
    log_probs, entropies, values = evaluate_batch(params, batch.inputs, batch.actions)
    ratio = np.exp(log_probs - batch.log_probs)
    clipped = np.clip(ratio, 1.0 - clip_epsilon, 1.0 + clip_epsilon)
    policy_loss = float(-np.mean(np.minimum(ratio * advantages, clipped * advantages)))
    value_loss = float(np.mean((values - returns) ** 2))
    entropy = float(np.mean(entropies))
    return {
        "policy_loss": policy_loss,
        "value_loss": value_loss,
        "entropy": entropy,
        "clip_fraction": float(np.mean(np.abs(ratio - 1.0) > clip_epsilon)),
    }


def ppo_update(
    params: PolicyParams,
    batch: RolloutBatch,
    config: TrainConfig,
    lr: float,
    discount: float,
    opt_state: AdamState | None = None,
    update_seed: int = 0,
) -> tuple[PolicyParams, AdamState | None, dict[str, float]]:
    """One full update: GAE, advantage standardization, then
    ``epochs_per_batch`` passes of shuffled minibatches.

    Returns a new parameter version; the input version is never mutated.
    """
    advantages, returns = compute_advantages(
        batch.rewards, batch.values, discount, config.gae_lambda,
        batch.segment_lengths,
    )
    std = advantages.std()
    if std > 1e-8:
        advantages = (advantages - advantages.mean()) / std
    else:
        advantages = advantages - advantages.mean()

    flat = params.flat.copy()
    if config.optimizer == "adam" and opt_state is None:
        opt_state = AdamState.zeros(len(flat))
    n = len(batch.inputs)
    rng = np.random.default_rng([derive_seed(config.seed, update_seed), 0x09D])
    diagnostics: dict[str, float] = {}
    for _ in range(config.epochs_per_batch):
        order = rng.permutation(n)
        for lo in range(0, n, config.minibatch_size):
            idx = order[lo : lo + config.minibatch_size]
            current = PolicyParams(params.spec, flat)
            log_probs, _, values = evaluate_batch(
                current, batch.inputs[idx], batch.actions[idx]
            )
            ratio = np.exp(log_probs - batch.log_probs[idx])
            adv = advantages[idx]
            clipped = np.clip(ratio, 1.0 - config.clip_epsilon, 1.0 + config.clip_epsilon)
            surrogate = ratio * adv
            clipped_surrogate = clipped * adv
            # gradient flows through the ratio only where the unclipped
            # surrogate is the active branch of the min
            active = surrogate <= clipped_surrogate
            b = len(idx)
            coef_lp = np.where(active, -adv * ratio, 0.0) / b
            coef_val = 2.0 * config.value_coef * (values - returns[idx]) / b
            coef_ent = np.full(b, -config.entropy_coef / b)
            grad, _ = evaluate_batch_grad(
                current, batch.inputs[idx], batch.actions[idx],
                coef_lp, coef_ent, coef_val,
            )
            if not np.all(np.isfinite(grad)):
                raise RuntimeError(
                    "non-finite PPO gradient; diagnostics: "
                    f"ratio range [{ratio.min()}, {ratio.max()}], "
                    f"adv range [{adv.min()}, {adv.max()}], "
                    f"values range [{values.min()}, {values.max()}]"
                )
            if config.optimizer == "adam":
                flat = adam_step(flat, grad, opt_state, lr)
            else:
                flat = flat - lr * grad
    new_params = PolicyParams(params.spec, flat)
    diagnostics = ppo_loss_terms(
        new_params, batch, advantages, returns, config.clip_epsilon
    )
    total = (
        diagnostics["policy_loss"]
        + config.value_coef * diagnostics["value_loss"]
        - config.entropy_coef * diagnostics["entropy"]
    )
    if not math.isfinite(total):
        raise RuntimeError(f"non-finite PPO loss; diagnostics: {diagnostics}")
    diagnostics["total_loss"] = total
    return new_params, opt_state, diagnostics


# ----------------------------------------------------------------------
# environment wiring and rollouts
# ----------------------------------------------------------------------


@dataclass
class GameWiring:
    """Binds an environment to per-player policies.

    ``players`` are the strategic units (agent types for the economy); each
    player's policy controls all agent ids listed under it.
    """

    players: tuple[str, ...]
    agent_ids: dict[str, list[str]]
    specs: dict[str, PolicySpec]
    make_env: Callable[[], object]
    input_fn: Callable[[np.ndarray, str], np.ndarray]
    discounts: dict[str, float]  # per agent id


def econ_wiring(config: ScenarioConfig, hidden: tuple[int, ...] = (64, 64)) -> GameWiring:
    features = hetero_features(config)
    return GameWiring(
        players=AGENT_TYPES,
        agent_ids=agent_ids_by_type(config),
        specs=build_policy_specs(config, hidden=hidden),
        make_env=lambda: EconomyEnv(config),
        input_fn=lambda obs, agent_id: policy_input(obs, agent_id, config, features),
        discounts={aid: config.discount_for(aid) for aid in config.agent_ids},
    )


@dataclass
class EpisodeData:
    """Per-agent trajectories and returns for one finished episode."""

    transitions: dict[str, dict[str, list]]   # agent id -> arrays-in-progress
    rewards: dict[str, list[float]]           # agent id -> per-step rewards
    returns: dict[str, float]                 # agent id -> discounted return
    infos: list[dict]


def play_episode(
    wiring: GameWiring,
    policies: dict[str, PolicyParams],
    episode_seed: int,
    deterministic: bool = False,
    collect: set[str] | None = None,
) -> EpisodeData:
    """Run one episode with per-type policies; optionally collect transitions
    for the players in ``collect``."""
    env = wiring.make_env()
    obs = env.reset(episode_seed)
    rng = np.random.default_rng([episode_seed & _MASK, _ACTION_STREAM_TAG])
    collect = collect or set()
    transitions: dict[str, dict[str, list]] = {
        aid: {"inputs": [], "actions": [], "log_probs": [], "values": []}
        for player in collect
        for aid in wiring.agent_ids[player]
    }
    rewards: dict[str, list[float]] = {
        aid: [] for player in wiring.players for aid in wiring.agent_ids[player]
    }
    infos: list[dict] = []
    done = False
    while not done:
        actions: dict[str, np.ndarray] = {}
        for player in wiring.players:
            for aid in wiring.agent_ids[player]:
                x = wiring.input_fn(obs[aid], aid)
                sample = act(policies[player], x, rng, deterministic=deterministic)
                actions[aid] = sample.indices
                if player in collect:
                    tr = transitions[aid]
                    tr["inputs"].append(x)
                    tr["actions"].append(sample.indices)
                    tr["log_probs"].append(sample.log_prob)
                    tr["values"].append(sample.value)
        result = env.step(actions)
        for aid, r in result.rewards.items():
            rewards[aid].append(float(r))
        infos.append(result.info)
        obs = result.observations
        done = result.done
    returns = {
        aid: episode_return(r, wiring.discounts[aid]) for aid, r in rewards.items()
    }
    return EpisodeData(transitions=transitions, rewards=rewards, returns=returns, infos=infos)


def build_batch(episodes: list[EpisodeData], player: str, wiring: GameWiring) -> RolloutBatch:
    """Stack one player's transitions across episodes and controlled agents."""
    inputs, actions, log_probs, values, rewards, lengths = [], [], [], [], [], []
    for episode in episodes:
        for aid in wiring.agent_ids[player]:
            tr = episode.transitions[aid]
            n = len(tr["inputs"])
            if n == 0:
                continue
            inputs.extend(tr["inputs"])
            actions.extend(tr["actions"])
            log_probs.extend(tr["log_probs"])
            values.extend(tr["values"])
            rewards.extend(episode.rewards[aid])
            lengths.append(n)
    return RolloutBatch(
        inputs=np.asarray(inputs, dtype=np.float64),
        actions=np.asarray(actions, dtype=np.int64),
        log_probs=np.asarray(log_probs, dtype=np.float64),
        values=np.asarray(values, dtype=np.float64),
        rewards=np.asarray(rewards, dtype=np.float64),
        segment_lengths=np.asarray(lengths, dtype=np.int64),
    )


def _player_discount(wiring: GameWiring, player: str) -> float:
    discounts = {wiring.discounts[aid] for aid in wiring.agent_ids[player]}
    return discounts.pop() if len(discounts) == 1 else float(np.mean(sorted(discounts)))


# ----------------------------------------------------------------------
# training drivers
# ----------------------------------------------------------------------


@dataclass
class CurvePoint:
    scheme: str
    epoch: int
    episode: int
    agent_id: str
    agent_type: str
    discounted_return: float
    moving_avg: float


def _moving_average(history: list[float], window: int = MOVING_AVG_WINDOW) -> float:
    tail = history[-window:]
    return float(np.mean(tail))


def train_oracle(
    wiring: GameWiring,
    player: str,
    opponents: OpponentSampler,
    config: TrainConfig,
    scheme: str = "psro",
    epoch: int = 0,
) -> tuple[PolicyParams, list[CurvePoint]]:
    """Train one player against frozen opponents drawn from their mixture.

    One opponent draw per episode; only the learner's parameters change.
    Returns the trained strategy (a frozen new parameter version) and the
    per-episode training curve.
    """
    for other in wiring.players:
        if other != player and (
            other not in opponents.strategies or not opponents.strategies[other]
        ):
            raise ValueError(f"empty opponent strategy set for {other!r}")
    learner = init_policy(wiring.specs[player], derive_seed(config.seed, epoch, stable_hash(player)))
    opt_state: AdamState | None = None
    opponent_rng = np.random.default_rng(
        [derive_seed(config.seed, epoch) & _MASK, _OPPONENT_STREAM_TAG]
    )
    discount = _player_discount(wiring, player)
    lr = config.learning_rates[player]
    curves: list[CurvePoint] = []
    history: dict[str, list[float]] = {aid: [] for aid in wiring.agent_ids[player]}
    buffer: list[EpisodeData] = []
    updates = 0
    for k in range(config.episodes):
        draw = opponents.sample(opponent_rng)
        policies = dict(draw)
        policies[player] = learner
        episode = play_episode(
            wiring, policies,
            episode_seed=derive_seed(config.seed, epoch, k, 0xE9),
            collect={player},
        )
        buffer.append(episode)
        for aid in wiring.agent_ids[player]:
            history[aid].append(episode.returns[aid])
            curves.append(
                CurvePoint(
                    scheme=scheme, epoch=epoch, episode=k, agent_id=aid,
                    agent_type=player,
                    discounted_return=episode.returns[aid],
                    moving_avg=_moving_average(history[aid]),
                )
            )
        if len(buffer) >= config.episodes_per_batch or k == config.episodes - 1:
            batch = build_batch(buffer, player, wiring)
            learner, opt_state, _ = ppo_update(
                learner, batch, config, lr, discount, opt_state, update_seed=updates
            )
            updates += 1
            buffer = []
    return learner.copy(), curves


def train_best_response(
    agent_type_name: str,
    opponents: OpponentSampler,
    env_config: ScenarioConfig,
    train_config: TrainConfig,
    scheme: str = "psro",
    epoch: int = 0,
) -> tuple[PolicyParams, list[CurvePoint]]:
    """Best-response oracle on the economy for one agent type."""
    wiring = econ_wiring(env_config, hidden=train_config.hidden)
    return train_oracle(wiring, agent_type_name, opponents, train_config, scheme, epoch)


def train_imarl(
    env_config: ScenarioConfig,
    train_config: TrainConfig,
    episodes: int = 4000,
) -> tuple[dict[str, PolicyParams], list[CurvePoint]]:
    """Independent concurrent learning: all four type policies update from
    one shared episode stream."""
    wiring = econ_wiring(env_config, hidden=train_config.hidden)
    policies = {
        player: init_policy(
            wiring.specs[player], derive_seed(train_config.seed, stable_hash(player))
        )
        for player in wiring.players
    }
    opt_states: dict[str, AdamState | None] = {p: None for p in wiring.players}
    curves: list[CurvePoint] = []
    history: dict[str, list[float]] = {
        aid: [] for p in wiring.players for aid in wiring.agent_ids[p]
    }
    buffer: list[EpisodeData] = []
    updates = 0
    for k in range(episodes):
        episode = play_episode(
            wiring, policies,
            episode_seed=derive_seed(train_config.seed, k, 0x1A),
            collect=set(wiring.players),
        )
        buffer.append(episode)
        for player in wiring.players:
            for aid in wiring.agent_ids[player]:
                history[aid].append(episode.returns[aid])
                curves.append(
                    CurvePoint(
                        scheme="imarl", epoch=0, episode=k, agent_id=aid,
                        agent_type=player,
                        discounted_return=episode.returns[aid],
                        moving_avg=_moving_average(history[aid]),
                    )
                )
        if len(buffer) >= train_config.episodes_per_batch or k == episodes - 1:
            for player in wiring.players:
                batch = build_batch(buffer, player, wiring)
                policies[player], opt_states[player], _ = ppo_update(
                    policies[player], batch, train_config,
                    train_config.learning_rates[player],
                    _player_discount(wiring, player),
                    opt_states[player], update_seed=updates,
                )
            updates += 1
            buffer = []
    return {p: params.copy() for p, params in policies.items()}, curves
