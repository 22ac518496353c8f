"""Stylized-fact verdicts on constructed episode-log fixtures."""

import pytest

from macrogame.facts import check_law_of_demand, check_rate_inflation_relation


def firm_row(episode, step, firm, price, consumption):
    return {
        "episode": str(episode),
        "step": str(step),
        "agent_id": firm,
        "agent_type": "firm",
        "price": str(price),
        "consumption_received": str(consumption),
    }


def cb_row(episode, step, inflation, rate_next):
    return {
        "episode": str(episode),
        "step": str(step),
        "agent_id": "central_bank",
        "agent_type": "central_bank",
        "inflation": str(inflation),
        "rate_next": str(rate_next),
    }


class TestLawOfDemand:
    def test_inverse_price_consumption_passes(self):
        rows = []
        for episode in range(3):
            for step in range(4):
                rows.append(firm_row(episode, step, "firm_0", 456.0, 5.0))
                rows.append(firm_row(episode, step, "firm_1", 188.0, 20.0))
        verdict = check_law_of_demand(rows)
        assert verdict.verdict == "pass"
        assert verdict.statistic < 0

    def test_constant_prices_inconclusive(self):
        rows = [
            firm_row(0, t, f, 322.0, 10.0)
            for t in range(4)
            for f in ("firm_0", "firm_1")
        ]
        assert check_law_of_demand(rows).verdict == "inconclusive"

    def test_reversed_fixture_fails(self):
        rows = []
        for step in range(4):
            rows.append(firm_row(0, step, "firm_0", 456.0, 30.0))
            rows.append(firm_row(0, step, "firm_1", 188.0, 2.0))
        assert check_law_of_demand(rows).verdict == "fail"

    def test_single_firm_inconclusive(self):
        rows = [firm_row(0, t, "firm_0", 322.0, 5.0) for t in range(4)]
        assert check_law_of_demand(rows).verdict == "inconclusive"


class TestRateInflationRelation:
    def test_direct_relation_passes(self):
        rows = []
        for step in range(6):
            rows.append(cb_row(0, step, 1.10, 0.0575))
            rows.append(cb_row(0, step, 0.95, 0.0025))
        verdict = check_rate_inflation_relation(rows)
        assert verdict.verdict == "pass"
        assert verdict.statistic == pytest.approx(0.055)

    def test_constant_rate_zero_gap_fails(self):
        rows = [cb_row(0, t, 1.10 if t % 2 else 0.95, 0.03) for t in range(8)]
        verdict = check_rate_inflation_relation(rows)
        assert verdict.verdict == "fail"
        assert verdict.statistic == pytest.approx(0.0)

    def test_single_side_inconclusive(self):
        rows = [cb_row(0, 0, 1.10, 0.03)]
        assert check_rate_inflation_relation(rows).verdict == "inconclusive"

    def test_on_target_quarters_dropped(self):
        rows = [
            cb_row(0, 0, 1.02, 0.05),   # exactly on target: ignored
            cb_row(0, 1, 1.05, 0.04),
            cb_row(0, 2, 0.99, 0.01),
        ]
        verdict = check_rate_inflation_relation(rows)
        assert verdict.details["n_above"] == 1
        assert verdict.details["n_below"] == 1
        assert verdict.statistic == pytest.approx(0.03)
