"""Episodic multi-agent economy over a fixed quarterly horizon.

One ``EconomyEnv`` instance runs one episode at a time: ``reset`` initializes
the world at the calibration defaults and ``step`` advances one quarter,
applying the core dynamics in order (production, allocation, inventory,
savings/taxes, credits, inflation, rewards) and then installing the
next-quarter prices, wages, interest rate and tax rate chosen this quarter.

Firm production shocks come from counter-based random streams keyed by
(episode seed, firm, step), so trajectories are bit-for-bit reproducible and
parallel episode execution cannot perturb the draws.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import dynamics, rewards
from ..core.params import PRICE_WINDOW, WorldState
from .config import ScenarioConfig
from .grids import DEFAULT_INDEX, DecodedActions, decode_actions

_SHOCK_STREAM_TAG = 0x5E0C  # domain separator for shock draws


def agent_type(agent_id: str) -> str:
    """Map an agent id like ``household_0`` to its type name."""
    if agent_id in ("central_bank", "government"):
        return agent_id
    kind = agent_id.rsplit("_", 1)[0]
    if kind in ("household", "firm"):
        return kind
    raise KeyError(f"unknown agent id {agent_id!r}")


def observation_lengths(n_households: int, n_firms: int) -> dict[str, int]:
    """Observation vector length per agent type."""
    return {
        "household": 4 + 2 * n_firms,
        "firm": 7,
        "central_bank": PRICE_WINDOW + 1,
        "government": 1 + 3 * n_households,
    }


@dataclass
class StepResult:
    observations: dict[str, np.ndarray]  # for the next quarter
    rewards: dict[str, float]
    done: bool
    info: dict


def episode_return(step_rewards, discount: float) -> float:
    """Discounted sum of one agent's per-step rewards."""
    if not 0.0 <= discount < 1.0:
        raise ValueError(f"discount must lie in [0, 1), got {discount}")
    r = np.asarray(step_rewards, dtype=np.float64)
    return float(np.sum(r * discount ** np.arange(len(r))))


def _shock(episode_seed: int, firm: int, step: int, mean: float, std: float) -> float:
    key = [episode_seed & 0xFFFFFFFFFFFFFFFF, _SHOCK_STREAM_TAG, firm, step]
    return float(np.random.default_rng(key).normal(mean, std))


class EconomyEnv:
    """Quarterly multi-agent economy with discrete grid actions.

    Single-threaded per instance; run multiple instances for parallelism.
    """

    def __init__(self, config: ScenarioConfig):
        self.config = config
        self.state: WorldState | None = None
        self._episode_seed = config.seed
        self._done = True

    # ------------------------------------------------------------------
    # episode control
    # ------------------------------------------------------------------

    def reset(self, seed: int | None = None) -> dict[str, np.ndarray]:
        """Start a new episode; returns the quarter-0 observations.

        Households start with $0 savings, firms with zero inventory and unit
        production factor; prices, wages, the interest rate and the tax rate
        start at the grid defaults; the price history is padded with the
        default total price so measured inflation starts at 1.
        """
        cfg = self.config
        self._episode_seed = cfg.seed if seed is None else int(seed)
        grids = cfg.action_grids
        default_total_price = cfg.n_firms * grids.prices[DEFAULT_INDEX]
        self.state = WorldState(
            savings=np.zeros(cfg.n_households),
            inventory=np.zeros(cfg.n_firms),
            prices=np.full(cfg.n_firms, grids.prices[DEFAULT_INDEX]),
            wages=np.full(cfg.n_firms, grids.wages[DEFAULT_INDEX]),
            production_factor=np.ones(cfg.n_firms),
            price_history=np.full(PRICE_WINDOW, default_total_price),
            interest_rate=float(grids.rates[DEFAULT_INDEX]),
            tax_rate=float(grids.tax_rates[DEFAULT_INDEX]),
            credits=np.zeros(cfg.n_households),
            step=0,
        )
        self._done = False
        return self._observations()

    def step(self, actions: dict[str, np.ndarray]) -> StepResult:
        """Advance one quarter given every agent's grid-index action."""
        if self.state is None or self._done:
            raise RuntimeError("episode is done or not started; call reset() first")
        cfg = self.config
        state = self.state
        t = state.step
        decoded = decode_actions(actions, cfg.action_grids, cfg.n_households, cfg.n_firms)

        # (b) evolve production factors with this quarter's shocks and produce
        shocks = np.array(
            [
                _shock(self._episode_seed, j, t, fp.shock_mean, fp.shock_std)
                for j, fp in enumerate(cfg.firm_params)
            ]
        )
        skills = np.stack([hp.skills for hp in cfg.household_params])  # (I, J)
        skilled_labor = (decoded.labor_hours * skills).sum(axis=0)  # per firm
        factors = np.array(
            [
                dynamics.evolve_production_factor(
                    state.production_factor[j], cfg.firm_params[j].rho, shocks[j]
                )
                for j in range(cfg.n_firms)
            ]
        )
        production = np.array(
            [
                dynamics.produce(factors[j], skilled_labor[j], cfg.firm_params[j].alpha)
                for j in range(cfg.n_firms)
            ]
        )

        # (c) allocate current inventory among consumption requests
        realized = np.zeros_like(decoded.consumption_requests)
        for j in range(cfg.n_firms):
            realized[:, j] = dynamics.allocate_consumption(
                decoded.consumption_requests[:, j], state.inventory[j]
            )
        consumed = realized.sum(axis=0)

        # (d) inventories: stock plus production minus consumption
        next_inventory = np.array(
            [
                dynamics.update_inventory(state.inventory[j], production[j], consumed[j])
                for j in range(cfg.n_firms)
            ]
        )

        # (e) household savings and taxes at the current rate/tax/credits
        incomes = decoded.labor_hours * skills * state.wages  # (I, J)
        costs = realized * state.prices  # (I, J)
        taxes = state.tax_rate * incomes.sum(axis=1)
        next_savings = np.array(
            [
                dynamics.update_savings(
                    state.savings[i],
                    state.interest_rate,
                    incomes[i],
                    costs[i],
                    state.tax_rate,
                    state.credits[i],
                )
                for i in range(cfg.n_households)
            ]
        )

        # (f) next-quarter credits redistribute this quarter's taxes
        total_tax = float(taxes.sum())
        next_credits = dynamics.compute_tax_credits(
            decoded.credit_fractions, total_tax, cfg.gov_params.redistribution_fraction
        )

        # (g) log the total price and measure annual inflation
        total_price = float(state.prices.sum())
        price_history = np.append(state.price_history[1:], total_price)
        inflation = dynamics.compute_inflation(price_history)

        # (h) rewards, raw and normalized
        raw, norm = self._compute_rewards(
            decoded, realized, next_savings, next_inventory, skilled_labor,
            consumed, inflation, production, state,
        )

        # quantities in effect during this quarter, for logs and diagnostics
        in_effect = {
            "prices": state.prices.copy(),
            "wages": state.wages.copy(),
            "interest_rate": state.interest_rate,
            "tax_rate": state.tax_rate,
            "credits": state.credits.copy(),
            "savings_before": state.savings.copy(),
        }

        # (i) install next-quarter controls chosen this quarter
        state.savings = next_savings
        state.inventory = next_inventory
        state.production_factor = factors
        state.price_history = price_history
        state.prices = decoded.prices.copy()
        state.wages = decoded.wages.copy()
        state.interest_rate = decoded.interest_rate
        state.tax_rate = decoded.tax_rate
        state.credits = next_credits
        state.last_skilled_labor = skilled_labor
        state.last_consumption = consumed
        state.last_tax_per_household = taxes
        state.last_total_production = float(production.sum())

        # (j) advance time
        state.step = t + 1
        self._done = state.step >= cfg.horizon

        info = {
            "step": t,
            "inflation": inflation,
            "production": production,
            "total_production": float(production.sum()),
            "taxes": taxes,
            "total_tax": total_tax,
            "realized_consumption": realized,
            "consumption_requests": decoded.consumption_requests,
            "labor_hours": decoded.labor_hours,
            "incomes": incomes,
            "costs": costs,
            "shocks": shocks,
            "in_effect": in_effect,
            "savings_after": next_savings.copy(),
            "inventory_next": next_inventory.copy(),
            "rewards_raw": raw,
            "rewards_normalized": norm,
            "decoded": decoded,
        }

        rewards_out = norm if cfg.normalized_rewards else raw
        return StepResult(
            observations=self._observations(),
            rewards=dict(rewards_out),
            done=self._done,
            info=info,
        )

    # ------------------------------------------------------------------
    # internals
    # ------------------------------------------------------------------

    def _compute_rewards(
        self,
        decoded: DecodedActions,
        realized: np.ndarray,
        next_savings: np.ndarray,
        next_inventory: np.ndarray,
        skilled_labor: np.ndarray,
        consumed: np.ndarray,
        inflation: float,
        production: np.ndarray,
        state: WorldState,
    ) -> tuple[dict[str, float], dict[str, float]]:
        cfg = self.config
        raw: dict[str, float] = {}
        norm: dict[str, float] = {}

        hh_raw = np.zeros(cfg.n_households)
        hh_norm = np.zeros(cfg.n_households)
        for i, hp in enumerate(cfg.household_params):
            hh_raw[i] = rewards.household_reward(
                realized[i], decoded.labor_hours[i], next_savings[i], hp
            )
            hh_norm[i] = rewards.household_reward(
                realized[i],
                decoded.labor_hours[i],
                next_savings[i],
                hp,
                normalized=True,
                norm=cfg.norm,
                current_prices=state.prices,
            )
            raw[f"household_{i}"] = float(hh_raw[i])
            norm[f"household_{i}"] = float(hh_norm[i])

        for j, fp in enumerate(cfg.firm_params):
            raw[f"firm_{j}"] = rewards.firm_reward(
                state.prices[j], state.wages[j], consumed[j],
                skilled_labor[j], next_inventory[j], fp,
            )
            norm[f"firm_{j}"] = rewards.firm_reward(
                state.prices[j], state.wages[j], consumed[j],
                skilled_labor[j], next_inventory[j], fp,
                normalized=True, norm=cfg.norm, n_households=cfg.n_households,
            )

        total_production = float(production.sum())
        raw["central_bank"] = rewards.central_bank_reward(
            inflation, total_production, cfg.cb_params
        )
        norm["central_bank"] = rewards.central_bank_reward(
            inflation,
            total_production,
            cfg.cb_params,
            normalized=True,
            firm_alphas=cfg.firm_alphas,
            n_households=cfg.n_households,
            norm=cfg.norm,
        )

        # welfare weights use the savings households held entering the quarter
        weights = np.array(
            [dynamics.welfare_weight(m, cfg.gov_params) for m in state.savings]
        )
        raw["government"] = rewards.government_reward(weights, hh_raw)
        norm["government"] = rewards.government_reward(weights, hh_norm)
        return raw, norm

    def _observations(self) -> dict[str, np.ndarray]:
        cfg = self.config
        state = self.state
        obs: dict[str, np.ndarray] = {}

        for i in range(cfg.n_households):
            obs[f"household_{i}"] = np.concatenate(
                [
                    [state.credits[i], state.tax_rate, state.interest_rate],
                    state.wages,
                    state.prices,
                    [state.savings[i]],
                ]
            )

        # a firm observes the shock its production will see this quarter; at
        # quarter 0 no shock has been drawn yet and the feature reads 0
        for j, fp in enumerate(cfg.firm_params):
            shock_feature = (
                _shock(self._episode_seed, j, state.step, fp.shock_mean, fp.shock_std)
                if state.step > 0
                else 0.0
            )
            obs[f"firm_{j}"] = np.array(
                [
                    state.last_skilled_labor[j],
                    state.last_consumption[j],
                    shock_feature,
                    state.production_factor[j],
                    state.wages[j],
                    state.prices[j],
                    state.inventory[j],
                ]
            )

        # window of the five quarterly price totals ending at this quarter
        window = np.append(state.price_history[1:], state.prices.sum())
        obs["central_bank"] = np.append(window, state.last_total_production)

        weights = np.array(
            [dynamics.welfare_weight(m, cfg.gov_params) for m in state.savings]
        )
        obs["government"] = np.concatenate(
            [
                [state.tax_rate],
                state.credits,
                state.last_tax_per_household,
                weights,
            ]
        )
        return obs
