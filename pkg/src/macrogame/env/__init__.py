"""Episodic multi-agent economy: configuration, action grids, environment."""

from .config import (
    ConfigError,
    ScenarioConfig,
    heterogeneous_skills_scenario,
    load_config,
    load_scenario,
    scenario_from_dict,
)
from .environment import (
    EconomyEnv,
    StepResult,
    agent_type,
    episode_return,
    observation_lengths,
)
from .grids import DEFAULT_INDEX, ActionGrids, DecodedActions, decode_actions

__all__ = [
    "DEFAULT_INDEX",
    "ActionGrids",
    "ConfigError",
    "DecodedActions",
    "EconomyEnv",
    "ScenarioConfig",
    "StepResult",
    "agent_type",
    "decode_actions",
    "episode_return",
    "heterogeneous_skills_scenario",
    "load_config",
    "load_scenario",
    "observation_lengths",
    "scenario_from_dict",
]
