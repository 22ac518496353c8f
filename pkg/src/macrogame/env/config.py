"""Scenario configuration and YAML loading.

The config file has three sections (``scenario``, ``training``, ``psro``)
mirroring the corresponding runtime records. Unknown keys anywhere are hard
errors so that a typo cannot silently fall back to a default.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np
import yaml

from ..core.params import (
    CentralBankParams,
    FirmParams,
    GovernmentParams,
    HouseholdParams,
    NormalizationDefaults,
)
from .grids import ActionGrids


class ConfigError(ValueError):
    """A configuration file or record failed validation."""


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to instantiate an episodic economy."""

    n_households: int
    n_firms: int
    household_params: tuple[HouseholdParams, ...]
    firm_params: tuple[FirmParams, ...]
    cb_params: CentralBankParams = CentralBankParams()
    gov_params: GovernmentParams = GovernmentParams()
    action_grids: ActionGrids = field(default_factory=ActionGrids)
    norm: NormalizationDefaults = NormalizationDefaults()
    horizon: int = 40
    seed: int = 0
    normalized_rewards: bool = True

    def __post_init__(self):
        if self.horizon < 5:
            raise ConfigError(
                f"horizon: must be at least 5 quarters (inflation window), "
                f"got {self.horizon}"
            )
        if self.n_households < 1 or self.n_firms < 1:
            raise ConfigError("n_households and n_firms must be positive")
        if len(self.household_params) != self.n_households:
            raise ConfigError(
                f"household_params: expected {self.n_households} records, "
                f"got {len(self.household_params)}"
            )
        if len(self.firm_params) != self.n_firms:
            raise ConfigError(
                f"firm_params: expected {self.n_firms} records, "
                f"got {len(self.firm_params)}"
            )
        for i, hp in enumerate(self.household_params):
            if len(hp.skills) != self.n_firms:
                raise ConfigError(
                    f"household_params[{i}].skills: expected {self.n_firms} "
                    f"entries, got {len(hp.skills)}"
                )

    @property
    def firm_alphas(self) -> np.ndarray:
        return np.array([fp.alpha for fp in self.firm_params])

    @property
    def agent_ids(self) -> list[str]:
        return (
            [f"household_{i}" for i in range(self.n_households)]
            + [f"firm_{j}" for j in range(self.n_firms)]
            + ["central_bank", "government"]
        )

    def discount_for(self, agent_id: str) -> float:
        kind, _, index = agent_id.partition("_")
        if agent_id.startswith("household_"):
            return self.household_params[int(index)].discount
        if agent_id.startswith("firm_"):
            return self.firm_params[int(index)].discount
        if agent_id == "central_bank":
            return self.cb_params.discount
        if agent_id == "government":
            return self.gov_params.discount
        raise KeyError(f"unknown agent id {agent_id!r}")


def heterogeneous_skills_scenario(seed: int = 0) -> ScenarioConfig:
    """The shipped two-household, two-firm skill-heterogeneity scenario.

    Household 1 is twice as skilled at firm 1; firm 2 runs the linear
    (labor-intensive) technology.
    """
    return ScenarioConfig(
        n_households=2,
        n_firms=2,
        household_params=(
            HouseholdParams(skills=[2.0, 1.0], gamma=0.33, nu=0.5, mu=1.0),
            HouseholdParams(skills=[1.0, 1.0], gamma=0.33, nu=0.5, mu=1.0),
        ),
        firm_params=(
            FirmParams(alpha=2.0 / 3.0),
            FirmParams(alpha=1.0),
        ),
        cb_params=CentralBankParams(),
        gov_params=GovernmentParams(),
        horizon=40,
        seed=seed,
    )


def _check_keys(section: dict, allowed: set[str], where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")


def _build_record(cls, section: dict, where: str):
    allowed = {f.name for f in fields(cls)}
    _check_keys(section, allowed, where)
    try:
        return cls(**section)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


_SCENARIO_KEYS = {
    "n_households",
    "n_firms",
    "horizon",
    "seed",
    "normalized_rewards",
    "households",
    "firms",
    "central_bank",
    "government",
    "action_grids",
    "normalization",
}


def scenario_from_dict(section: dict) -> ScenarioConfig:
    _check_keys(section, _SCENARIO_KEYS, "scenario")
    try:
        n_households = int(section["n_households"])
        n_firms = int(section["n_firms"])
    except KeyError as exc:
        raise ConfigError(f"scenario: missing required key {exc}") from exc

    households = tuple(
        _build_record(HouseholdParams, h, f"scenario.households[{i}]")
        for i, h in enumerate(section.get("households", []))
    )
    firms = tuple(
        _build_record(FirmParams, f, f"scenario.firms[{j}]")
        for j, f in enumerate(section.get("firms", []))
    )
    kwargs = dict(
        n_households=n_households,
        n_firms=n_firms,
        household_params=households,
        firm_params=firms,
    )
    if "central_bank" in section:
        kwargs["cb_params"] = _build_record(
            CentralBankParams, section["central_bank"], "scenario.central_bank"
        )
    if "government" in section:
        kwargs["gov_params"] = _build_record(
            GovernmentParams, section["government"], "scenario.government"
        )
    if "action_grids" in section:
        kwargs["action_grids"] = _build_record(
            ActionGrids, section["action_grids"], "scenario.action_grids"
        )
    if "normalization" in section:
        kwargs["norm"] = _build_record(
            NormalizationDefaults, section["normalization"], "scenario.normalization"
        )
    for key in ("horizon", "seed", "normalized_rewards"):
        if key in section:
            kwargs[key] = section[key]
    return ScenarioConfig(**kwargs)


def load_config(path: str | Path) -> dict:
    """Load a YAML config file; returns the raw section dicts.

    Top-level sections: ``scenario`` (required for env commands), ``training``
    and ``psro`` (optional). Unknown top-level sections are hard errors.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    with open(path) as f:
        data = yaml.safe_load(f)
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config root must be a mapping")
    _check_keys(data, {"scenario", "training", "psro"}, str(path))
    return data


def load_scenario(path: str | Path) -> ScenarioConfig:
    data = load_config(path)
    if "scenario" not in data:
        raise ConfigError(f"{path}: missing required 'scenario' section")
    return scenario_from_dict(data["scenario"])
