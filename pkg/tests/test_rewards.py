"""Reward formulas: listed examples, normalization rows, random brute force."""

import numpy as np
import pytest

from macrogame.core import (
    CentralBankParams,
    FirmParams,
    GovernmentParams,
    HouseholdParams,
    NormalizationDefaults,
    central_bank_reward,
    firm_reward,
    government_reward,
    household_reward,
    household_utility,
    welfare_weight,
)

REL_TOL = 1e-9
NORM = NormalizationDefaults()

ISO_UNIT = 1.0 / 0.67  # x ** 0.67 / 0.67 at x = 1, gamma = 0.33


def relerr(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def hh(skills=(1.0,), gamma=0.33, nu=0.5, mu=1.0):
    return HouseholdParams(skills=list(skills), gamma=gamma, nu=nu, mu=mu)


def utility_oracle(c, n, m, gamma, nu, mu):
    """Scalar recomputation of the isoelastic-plus-quadratic utility."""
    cons = c ** (1 - gamma) / (1 - gamma)
    sav = mu * np.sign(m) * abs(m) ** (1 - gamma) / (1 - gamma)
    return cons - nu * n**2 + sav


class TestHouseholdUtility:
    def test_unit_consumption(self):
        got = household_utility(1.0, 0.0, 0.0, hh())
        assert relerr(got, ISO_UNIT) <= REL_TOL

    def test_all_zero(self):
        assert household_utility(0.0, 0.0, 0.0, hh()) == 0.0

    def test_labor_and_debt(self):
        got = household_utility(0.0, 1.0, -1.0, hh())
        assert relerr(got, -0.5 - ISO_UNIT) <= REL_TOL

    def test_gamma_one_rejected_at_params(self):
        with pytest.raises(ValueError):
            HouseholdParams(skills=[1.0], gamma=1.0)

    def test_random(self):
        rng = np.random.default_rng(41)
        for _ in range(1000):
            params = hh(
                gamma=rng.uniform(0.05, 0.95),
                nu=rng.uniform(0, 2),
                mu=rng.uniform(0, 2),
            )
            c = rng.uniform(0, 30)
            n = rng.uniform(0, 1000)
            m = rng.uniform(-1e4, 1e4)
            expected = utility_oracle(c, n, m, params.gamma, params.nu, params.mu)
            assert relerr(household_utility(c, n, m, params), expected) <= REL_TOL


class TestHouseholdReward:
    def test_savings_term_once_per_firm(self):
        params = hh(skills=(1.0, 1.0))
        got = household_reward(np.array([1.0, 1.0]), np.array([0.0, 0.0]), 0.0, params)
        assert relerr(got, 2 * ISO_UNIT) <= REL_TOL

    def test_all_zero(self):
        params = hh(skills=(1.0, 1.0))
        assert household_reward(np.zeros(2), np.zeros(2), 0.0, params) == 0.0

    def test_normalized_brute_substitution(self):
        # one firm at the default price: the normalizer is
        # (480 * 32.06) * 322, so a balance of 15388.8 * 322 maps to exactly 1
        # (brute substitution: 15388.8 * 322 / (480 * 32.06 * 322) = 1)
        params = hh(skills=(1.0,))
        m = NORM.default_labor * NORM.default_wage * 322.0
        got = household_reward(
            np.array([1.0]), np.array([480.0]), m, params,
            normalized=True, norm=NORM, current_prices=np.array([322.0]),
        )
        assert relerr(got, 2 * ISO_UNIT - 0.5) <= REL_TOL
        # doubled prices halve the normalized value of the same balance
        doubled = household_reward(
            np.array([1.0]), np.array([480.0]), m, params,
            normalized=True, norm=NORM, current_prices=np.array([644.0]),
        )
        expected = utility_oracle(1.0, 1.0, 0.5, params.gamma, params.nu, params.mu)
        assert relerr(doubled, expected) <= REL_TOL

    def test_normalized_equals_scaled_raw_random(self):
        # the normalized reward must equal raw evaluation of the scaled inputs
        rng = np.random.default_rng(43)
        for _ in range(1000):
            n_firms = rng.integers(1, 4)
            params = hh(
                skills=np.full(n_firms, 1.0),
                gamma=rng.uniform(0.05, 0.95),
                nu=rng.uniform(0, 2),
                mu=rng.uniform(0, 2),
            )
            c = rng.uniform(0, 24, n_firms)
            n = rng.uniform(0, 960, n_firms)
            m = rng.uniform(-1e5, 1e5)
            prices = rng.uniform(188, 456, n_firms)
            got = household_reward(
                c, n, m, params, normalized=True, norm=NORM, current_prices=prices
            )
            m_scale = (NORM.default_labor * n_firms * NORM.default_wage) * prices.mean()
            expected = sum(
                utility_oracle(
                    c[j], n[j] / NORM.default_labor, m / m_scale,
                    params.gamma, params.nu, params.mu,
                )
                for j in range(n_firms)
            )
            assert relerr(got, expected) <= REL_TOL


class TestFirmReward:
    def test_default_quarter(self):
        got = firm_reward(322.0, 32.06, 12.0, 480.0, 0.0, FirmParams())
        assert relerr(got, -11524.8) <= REL_TOL

    def test_all_zero_flows(self):
        assert firm_reward(0.0, 0.0, 0.0, 0.0, 0.0, FirmParams()) == 0.0

    def test_inventory_risk_only(self):
        got = firm_reward(322.0, 0.0, 0.0, 0.0, 10.0, FirmParams())
        assert relerr(got, -322.0) <= REL_TOL

    def test_raw_random(self):
        rng = np.random.default_rng(47)
        for _ in range(1000):
            params = FirmParams(inventory_risk=rng.uniform(0, 0.5))
            p, w = rng.uniform(188, 456), rng.uniform(7, 57)
            cons, labor, inv = rng.uniform(0, 48), rng.uniform(0, 2000), rng.uniform(0, 500)
            expected = p * cons - w * labor - params.inventory_risk * p * inv
            assert relerr(firm_reward(p, w, cons, labor, inv, params), expected) <= REL_TOL

    def test_normalized_brute_substitution_random(self):
        rng = np.random.default_rng(53)
        for _ in range(1000):
            n_households = rng.integers(1, 4)
            params = FirmParams(
                shock_mean=rng.uniform(-0.1, 0.1),
                shock_std=rng.uniform(0, 0.3),
                inventory_risk=rng.uniform(0, 0.5),
            )
            p, w = rng.uniform(188, 456), rng.uniform(7, 57)
            cons, labor, inv = rng.uniform(0, 48), rng.uniform(0, 2000), rng.uniform(0, 500)
            got = firm_reward(
                p, w, cons, labor, inv, params,
                normalized=True, norm=NORM, n_households=n_households,
            )
            expected = (
                p * cons / (NORM.default_price * n_households * NORM.default_consumption)
                - w * labor / (NORM.default_wage * n_households * NORM.default_labor)
                - params.inventory_risk * p * inv
                / (
                    NORM.default_price
                    * np.exp(params.shock_mean + 10 * params.shock_std)
                    * n_households
                    * NORM.default_labor
                )
            )
            assert relerr(got, expected) <= REL_TOL


class TestCentralBankReward:
    def test_on_target_no_production(self):
        assert central_bank_reward(1.02, 0.0, CentralBankParams()) == 0.0

    def test_production_bonus(self):
        got = central_bank_reward(1.02, 2.0, CentralBankParams())
        assert relerr(got, 1.0) <= REL_TOL

    def test_inflation_miss(self):
        got = central_bank_reward(1.12, 0.0, CentralBankParams())
        assert relerr(got, -0.01) <= REL_TOL

    def test_normalized_brute_substitution_random(self):
        rng = np.random.default_rng(59)
        for _ in range(1000):
            n_households = rng.integers(1, 4)
            alphas = rng.uniform(0.3, 1.0, rng.integers(1, 4))
            params = CentralBankParams(production_weight=rng.uniform(0.05, 1))
            inflation = rng.uniform(0.8, 1.3)
            total_y = rng.uniform(0, 2000)
            got = central_bank_reward(
                inflation, total_y, params,
                normalized=True, firm_alphas=alphas,
                n_households=n_households, norm=NORM,
            )
            default_output = sum(
                (n_households * NORM.default_labor) ** a for a in alphas
            )
            expected = (
                -((inflation - params.target_inflation) ** 2)
                + params.production_weight * (total_y / default_output) ** 2
            )
            assert relerr(got, expected) <= REL_TOL


class TestGovernmentReward:
    def test_utilitarian(self):
        assert government_reward(np.array([1.0, 1.0]), np.array([2.0, 3.0])) == 5.0

    def test_zero_weights(self):
        assert government_reward(np.zeros(2), np.array([4.0, -7.0])) == 0.0

    def test_mixed_weights(self):
        got = government_reward(np.array([1.2, 3.2]), np.array([1.0, -1.0]))
        assert relerr(got, -2.0) <= REL_TOL

    def test_weighted_sum_random(self):
        rng = np.random.default_rng(61)
        gov = GovernmentParams()
        for _ in range(1000):
            n = rng.integers(1, 6)
            savings = rng.uniform(-20, 20, n)
            weights = np.array([welfare_weight(m, gov) for m in savings])
            hh_rewards = rng.uniform(-5, 5, n)
            expected = sum(weights[i] * hh_rewards[i] for i in range(n))
            assert relerr(government_reward(weights, hh_rewards), expected) <= 1e-12
