"""Wiring between the economy and the per-type policy networks.

One policy network is shared by all agents of a type; agents of the same type
are distinguished by a heterogeneity feature vector appended to the (fixed-
constant normalized) observation. Households append their per-firm skills and
utility parameters, firms their shock/technology parameters; the central bank
and government are singletons and append nothing.

Observations are normalized by calibration constants rather than running
statistics so that evaluation is deterministic and checkpoints are portable:
prices by the default price, wages by the default wage, dollar balances by
(default hours * default wage), hours by total default hours, goods by total
default consumption, rates and tax rates left raw.
"""

from __future__ import annotations

import numpy as np

from .core.params import PRICE_WINDOW
from .env.config import ScenarioConfig
from .env.environment import agent_type
from .policy import AGENT_TYPES, PolicySpec


def agent_ids_by_type(config: ScenarioConfig) -> dict[str, list[str]]:
    return {
        "household": [f"household_{i}" for i in range(config.n_households)],
        "firm": [f"firm_{j}" for j in range(config.n_firms)],
        "central_bank": ["central_bank"],
        "government": ["government"],
    }


def hetero_features(config: ScenarioConfig) -> dict[str, np.ndarray]:
    """Per-agent heterogeneity vectors appended to the policy input."""
    features: dict[str, np.ndarray] = {}
    for i, hp in enumerate(config.household_params):
        features[f"household_{i}"] = np.concatenate(
            [hp.skills, [hp.gamma, hp.nu, hp.mu]]
        )
    for j, fp in enumerate(config.firm_params):
        features[f"firm_{j}"] = np.array(
            [fp.rho, fp.shock_mean, fp.shock_std, fp.alpha, fp.inventory_risk]
        )
    features["central_bank"] = np.zeros(0)
    features["government"] = np.zeros(0)
    return features


def build_policy_specs(
    config: ScenarioConfig, hidden: tuple[int, ...] = (64, 64)
) -> dict[str, PolicySpec]:
    """One spec per agent type, sized to the scenario's counts and grids."""
    n_h, n_f = config.n_households, config.n_firms
    grids = config.action_grids
    return {
        "household": PolicySpec(
            agent_type="household",
            obs_dim=4 + 2 * n_f,
            hetero_dim=n_f + 3,
            action_dims=(len(grids.labor_hours),) * n_f
            + (len(grids.consumption_units),) * n_f,
            hidden=hidden,
        ),
        "firm": PolicySpec(
            agent_type="firm",
            obs_dim=7,
            hetero_dim=5,
            action_dims=(len(grids.wages), len(grids.prices)),
            hidden=hidden,
        ),
        "central_bank": PolicySpec(
            agent_type="central_bank",
            obs_dim=PRICE_WINDOW + 1,
            hetero_dim=0,
            action_dims=(len(grids.rates),),
            hidden=hidden,
        ),
        "government": PolicySpec(
            agent_type="government",
            obs_dim=1 + 3 * n_h,
            hetero_dim=0,
            action_dims=(len(grids.tax_rates),)
            + (len(grids.fraction_raw),) * n_h,
            hidden=hidden,
        ),
    }


def normalize_observation(
    obs: np.ndarray, kind: str, config: ScenarioConfig
) -> np.ndarray:
    """Rescale a raw observation by the fixed calibration constants."""
    norm = config.norm
    n_h, n_f = config.n_households, config.n_firms
    money = norm.default_labor * norm.default_wage
    out = np.asarray(obs, dtype=np.float64).copy()
    if kind == "household":
        out[0] /= money                        # tax credit ($)
        out[3 : 3 + n_f] /= norm.default_wage  # wages
        out[3 + n_f : 3 + 2 * n_f] /= norm.default_price  # prices
        out[-1] /= money                       # savings ($)
    elif kind == "firm":
        out[0] /= n_h * norm.default_labor     # skilled labor (hours)
        out[1] /= n_h * norm.default_consumption  # consumption (units)
        out[4] /= norm.default_wage
        out[5] /= norm.default_price
        out[6] /= n_h * norm.default_consumption  # inventory (units)
    elif kind == "central_bank":
        out[:PRICE_WINDOW] /= n_f * norm.default_price  # price totals
        default_output = np.sum(
            (n_h * norm.default_labor) ** config.firm_alphas
        )
        out[PRICE_WINDOW] /= default_output    # total production
    elif kind == "government":
        out[1 : 1 + n_h] /= money              # credits ($)
        out[1 + n_h : 1 + 2 * n_h] /= money    # taxes collected ($)
        # tax rate and welfare weights are already O(1)
    else:
        raise KeyError(f"unknown agent type {kind!r}")
    return out


def policy_input(
    obs: np.ndarray, agent_id: str, config: ScenarioConfig,
    features: dict[str, np.ndarray],
) -> np.ndarray:
    kind = agent_type(agent_id)
    return np.concatenate(
        [normalize_observation(obs, kind, config), features[agent_id]]
    )


def assert_specs_cover(config: ScenarioConfig, specs: dict[str, PolicySpec]) -> None:
    for kind in AGENT_TYPES:
        if kind not in specs:
            raise KeyError(f"missing policy spec for agent type {kind!r}")
