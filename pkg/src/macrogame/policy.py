"""Per-agent-type stochastic policies as small numpy MLPs.

A policy maps (normalized observation ++ heterogeneity features) through a
tanh torso to one independent categorical head per discrete action dimension
plus a scalar value head. Parameters live in one flat float64 vector with a
shape table, so checkpointing, gradient updates and finite-difference checks
all operate on a single array.

All forward/backward math is written out explicitly; gradients of log-prob,
entropy and value with respect to every parameter are exact.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

AGENT_TYPES = ("household", "firm", "central_bank", "government")


class CheckpointError(RuntimeError):
    """A policy checkpoint failed to load (truncation, corruption)."""


@dataclass(frozen=True)
class PolicySpec:
    """Architecture of one agent type's policy network."""

    agent_type: str
    obs_dim: int
    hetero_dim: int
    action_dims: tuple[int, ...]
    hidden: tuple[int, ...] = (64, 64)
    activation: str = "tanh"

    def __post_init__(self):
        object.__setattr__(self, "action_dims", tuple(int(d) for d in self.action_dims))
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        if any(d < 2 for d in self.action_dims):
            raise ValueError(f"every action head needs >= 2 choices: {self.action_dims}")
        if self.activation != "tanh":
            raise ValueError(f"unsupported activation {self.activation!r}")
        if self.obs_dim < 1 or self.hetero_dim < 0 or not self.hidden:
            raise ValueError("invalid dimensions in policy spec")

    @property
    def input_dim(self) -> int:
        return self.obs_dim + self.hetero_dim

    def shape_table(self) -> list[tuple[str, tuple[int, ...]]]:
        table: list[tuple[str, tuple[int, ...]]] = []
        fan_in = self.input_dim
        for layer, width in enumerate(self.hidden):
            table.append((f"torso_w{layer}", (fan_in, width)))
            table.append((f"torso_b{layer}", (width,)))
            fan_in = width
        for head, size in enumerate(self.action_dims):
            table.append((f"head{head}_w", (fan_in, size)))
            table.append((f"head{head}_b", (size,)))
        table.append(("value_w", (fan_in, 1)))
        table.append(("value_b", (1,)))
        return table

    def param_count(self) -> int:
        return sum(int(np.prod(shape)) for _, shape in self.shape_table())


@dataclass
class PolicyParams:
    """One parameter version: a flat vector interpreted via the spec."""

    spec: PolicySpec
    flat: np.ndarray

    def __post_init__(self):
        self.flat = np.asarray(self.flat, dtype=np.float64)
        if self.flat.shape != (self.spec.param_count(),):
            raise ValueError(
                f"expected {self.spec.param_count()} parameters, got {self.flat.shape}"
            )
        if not np.all(np.isfinite(self.flat)):
            raise ValueError("policy parameters must be finite")

    def views(self) -> dict[str, np.ndarray]:
        """Named views into the flat vector, in shape-table order."""
        out: dict[str, np.ndarray] = {}
        offset = 0
        for name, shape in self.spec.shape_table():
            size = int(np.prod(shape))
            out[name] = self.flat[offset : offset + size].reshape(shape)
            offset += size
        return out

    def copy(self) -> "PolicyParams":
        return PolicyParams(self.spec, self.flat.copy())

    def content_hash(self) -> str:
        digest = hashlib.sha256()
        digest.update(json.dumps(_spec_to_dict(self.spec), sort_keys=True).encode())
        digest.update(np.ascontiguousarray(self.flat, dtype="<f8").tobytes())
        return digest.hexdigest()


@dataclass
class ActionSample:
    indices: np.ndarray   # one per action head
    log_prob: float       # summed over heads
    value: float


def init_policy(spec: PolicySpec, seed: int) -> PolicyParams:
    """Scaled-normal weights, zero biases, small logits so heads start
    near-uniform. Deterministic in the seed."""
    rng = np.random.default_rng(seed)
    chunks = []
    for name, shape in spec.shape_table():
        if "_b" in name:
            chunks.append(np.zeros(int(np.prod(shape))))
        else:
            fan_in = shape[0]
            scale = 1.0 / np.sqrt(fan_in)
            if name.startswith("head"):
                scale *= 0.01  # near-uniform initial action distributions
            chunks.append(rng.normal(0.0, scale, int(np.prod(shape))))
    return PolicyParams(spec, np.concatenate(chunks))


# ----------------------------------------------------------------------
# forward / backward
# ----------------------------------------------------------------------


@dataclass
class _Forward:
    activations: list[np.ndarray]      # torso inputs/outputs, activations[0] = X
    logits: list[np.ndarray]           # per head, (B, k)
    log_probs: list[np.ndarray]        # per head log-softmax, (B, k)
    probs: list[np.ndarray]            # per head softmax, (B, k)
    values: np.ndarray                 # (B,)


def _forward(params: PolicyParams, inputs: np.ndarray) -> _Forward:
    spec = params.spec
    x = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    if x.shape[1] != spec.input_dim:
        raise ValueError(
            f"expected input dimension {spec.input_dim}, got {x.shape[1]}"
        )
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite policy input")
    views = params.views()
    activations = [x]
    h = x
    for layer in range(len(spec.hidden)):
        z = h @ views[f"torso_w{layer}"] + views[f"torso_b{layer}"]
        h = np.tanh(z)
        activations.append(h)
    logits, log_probs, probs = [], [], []
    for head in range(len(spec.action_dims)):
        lg = h @ views[f"head{head}_w"] + views[f"head{head}_b"]
        shifted = lg - lg.max(axis=1, keepdims=True)
        lse = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
        lp = shifted - lse
        logits.append(lg)
        log_probs.append(lp)
        probs.append(np.exp(lp))
    values = (h @ views["value_w"] + views["value_b"])[:, 0]
    return _Forward(activations, logits, log_probs, probs, values)


def act(
    params: PolicyParams,
    observation: np.ndarray,
    rng: np.random.Generator | None = None,
    deterministic: bool = False,
) -> ActionSample:
    """Sample one action per head; deterministic mode takes per-head argmax
    with ties broken toward the lowest index."""
    fwd = _forward(params, observation)
    indices = np.zeros(len(params.spec.action_dims), dtype=np.int64)
    log_prob = 0.0
    for head, probs in enumerate(fwd.probs):
        p = probs[0]
        if deterministic:
            idx = int(np.argmax(p))
        else:
            if rng is None:
                raise ValueError("sampling requires an rng (or deterministic=True)")
            u = rng.random()
            idx = int(min(np.searchsorted(np.cumsum(p), u, side="right"), len(p) - 1))
        indices[head] = idx
        log_prob += float(fwd.log_probs[head][0, idx])
    return ActionSample(indices=indices, log_prob=log_prob, value=float(fwd.values[0]))


def evaluate_batch(
    params: PolicyParams, inputs: np.ndarray, actions: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-row (log_prob, entropy, value) for given action index rows."""
    fwd = _forward(params, inputs)
    actions = np.atleast_2d(np.asarray(actions, dtype=np.int64))
    batch = fwd.values.shape[0]
    if actions.shape != (batch, len(params.spec.action_dims)):
        raise ValueError(
            f"expected actions of shape {(batch, len(params.spec.action_dims))}, "
            f"got {actions.shape}"
        )
    rows = np.arange(batch)
    log_probs = np.zeros(batch)
    entropies = np.zeros(batch)
    for head in range(len(params.spec.action_dims)):
        log_probs += fwd.log_probs[head][rows, actions[:, head]]
        entropies += -(fwd.probs[head] * fwd.log_probs[head]).sum(axis=1)
    return log_probs, entropies, fwd.values.copy()


def evaluate_batch_grad(
    params: PolicyParams,
    inputs: np.ndarray,
    actions: np.ndarray,
    coef_log_prob: np.ndarray,
    coef_entropy: np.ndarray,
    coef_value: np.ndarray,
) -> tuple[np.ndarray, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Gradient of ``sum_rows c_lp*log_prob + c_ent*entropy + c_val*value``
    with respect to the flat parameter vector.

    Returns the flat gradient and the per-row (log_prob, entropy, value).
    """
    spec = params.spec
    fwd = _forward(params, inputs)
    actions = np.atleast_2d(np.asarray(actions, dtype=np.int64))
    batch = fwd.values.shape[0]
    rows = np.arange(batch)
    c_lp = np.asarray(coef_log_prob, dtype=np.float64).reshape(batch)
    c_ent = np.asarray(coef_entropy, dtype=np.float64).reshape(batch)
    c_val = np.asarray(coef_value, dtype=np.float64).reshape(batch)

    views = params.views()
    grads = {name: np.zeros(shape) for name, shape in spec.shape_table()}

    log_probs = np.zeros(batch)
    entropies = np.zeros(batch)
    h_last = fwd.activations[-1]
    d_h = np.zeros_like(h_last)

    for head in range(len(spec.action_dims)):
        lp = fwd.log_probs[head]
        p = fwd.probs[head]
        log_probs += lp[rows, actions[:, head]]
        head_entropy = -(p * lp).sum(axis=1)
        entropies += head_entropy

        one_hot = np.zeros_like(p)
        one_hot[rows, actions[:, head]] = 1.0
        # d(log p[a]) / d logits = onehot - p ; d(entropy)/d logits =
        # -p * (log p + H_head)
        d_logits = c_lp[:, None] * (one_hot - p) + c_ent[:, None] * (
            -p * (lp + head_entropy[:, None])
        )
        grads[f"head{head}_w"] += h_last.T @ d_logits
        grads[f"head{head}_b"] += d_logits.sum(axis=0)
        d_h += d_logits @ views[f"head{head}_w"].T

    grads["value_w"] += h_last.T @ c_val[:, None]
    grads["value_b"] += np.array([c_val.sum()])
    d_h += c_val[:, None] @ views["value_w"].T

    for layer in reversed(range(len(spec.hidden))):
        h = fwd.activations[layer + 1]
        d_z = d_h * (1.0 - h**2)  # tanh'
        grads[f"torso_w{layer}"] += fwd.activations[layer].T @ d_z
        grads[f"torso_b{layer}"] += d_z.sum(axis=0)
        d_h = d_z @ views[f"torso_w{layer}"].T

    flat_grad = np.concatenate(
        [grads[name].ravel() for name, _ in spec.shape_table()]
    )
    return flat_grad, (log_probs, entropies, fwd.values.copy())


# ----------------------------------------------------------------------
# checkpoint serialization
# ----------------------------------------------------------------------

_FORMAT = "macrogame-policy"
_VERSION = 1


def _spec_to_dict(spec: PolicySpec) -> dict:
    return {
        "agent_type": spec.agent_type,
        "obs_dim": spec.obs_dim,
        "hetero_dim": spec.hetero_dim,
        "action_dims": list(spec.action_dims),
        "hidden": list(spec.hidden),
        "activation": spec.activation,
    }


def _spec_from_dict(data: dict) -> PolicySpec:
    return PolicySpec(
        agent_type=data["agent_type"],
        obs_dim=int(data["obs_dim"]),
        hetero_dim=int(data["hetero_dim"]),
        action_dims=tuple(data["action_dims"]),
        hidden=tuple(data["hidden"]),
        activation=data["activation"],
    )


def save_policy(params: PolicyParams, path: str | Path) -> None:
    """Write a self-describing checkpoint: one JSON header line (spec echo,
    shape table, payload checksum) followed by little-endian float64 values
    in shape-table order. Round-trips bit-exactly."""
    payload = np.ascontiguousarray(params.flat, dtype="<f8").tobytes()
    header = {
        "format": _FORMAT,
        "version": _VERSION,
        "spec": _spec_to_dict(params.spec),
        "shapes": [[name, list(shape)] for name, shape in params.spec.shape_table()],
        "dtype": "<f8",
        "count": len(params.flat),
        "sha256": hashlib.sha256(payload).hexdigest(),
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(json.dumps(header).encode("utf-8"))
        f.write(b"\n")
        f.write(payload)


def load_policy(path: str | Path, spec: PolicySpec | None = None) -> PolicyParams:
    """Load a checkpoint; verifies the payload checksum and, when ``spec`` is
    given, the shape table against it (naming the first offending layer)."""
    path = Path(path)
    with open(path, "rb") as f:
        header_line = f.readline()
        payload = f.read()
    try:
        header = json.loads(header_line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"{path}: unreadable checkpoint header") from exc
    if header.get("format") != _FORMAT:
        raise CheckpointError(f"{path}: not a policy checkpoint")
    expected_bytes = int(header["count"]) * 8
    if len(payload) != expected_bytes:
        raise CheckpointError(
            f"{path}: payload truncated ({len(payload)} of {expected_bytes} bytes)"
        )
    if hashlib.sha256(payload).hexdigest() != header["sha256"]:
        raise CheckpointError(f"{path}: payload checksum mismatch")
    file_spec = _spec_from_dict(header["spec"])
    if spec is not None:
        for (name_a, shape_a), (name_b, shape_b) in zip(
            spec.shape_table(), file_spec.shape_table()
        ):
            if name_a != name_b or shape_a != shape_b:
                raise ValueError(
                    f"{path}: layer {name_b} has shape {shape_b}, "
                    f"expected {name_a} with shape {shape_a}"
                )
        if spec.param_count() != file_spec.param_count():
            raise ValueError(f"{path}: parameter count mismatch")
    flat = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    return PolicyParams(file_spec, flat)
