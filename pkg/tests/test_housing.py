"""Home-value factor and reward-function tests."""

import math

import numpy as np
import pytest

from cirstop import HousingSpec, buy_payoff, home_value_deriv, home_value_factor, sell_payoff
from cirstop.errors import ConfigError, DependencyError


@pytest.fixture
def spec():
    return HousingSpec(
        cash_scale=100_000.0,
        spread=0.01,
        term=30.0,
        prop_buy=0.06,
        prop_sell=0.06,
        fixed_buy=5000.0,
        fixed_sell=5000.0,
    )


class TestHomeValue:
    def test_closed_form_value(self, spec):
        # frozen from 40-digit arithmetic of C/(r+rho) (1 - e^(-(r+rho)T))
        assert home_value_factor(spec, 0.08) == pytest.approx(1036438.3191780558, rel=1e-13)
        assert home_value_factor(spec, 0.02) == pytest.approx(1978101.134198003, rel=1e-13)

    def test_decreasing(self, spec):
        rs = np.geomspace(1e-4, 2.0, 100)
        vals = [home_value_factor(spec, r) for r in rs]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_short_term_limit(self):
        tiny = HousingSpec(
            cash_scale=100_000.0,
            spread=0.01,
            term=1e-9,
            prop_buy=0.06,
            prop_sell=0.06,
            fixed_buy=5000.0,
            fixed_sell=5000.0,
        )
        assert home_value_factor(tiny, 0.08) == pytest.approx(0.0, abs=1e-3)

    def test_deriv_negative(self, spec):
        for r in np.geomspace(1e-4, 2.0, 50):
            assert home_value_deriv(spec, r) < 0.0

    def test_deriv_value(self, spec):
        # frozen from arbitrary-precision differentiation
        assert home_value_deriv(spec, 0.08) == pytest.approx(-9275797.5662089613, rel=1e-12)

    def test_deriv_matches_finite_difference(self, spec):
        for r in (0.02, 0.08, 0.3):
            h = 1e-6 * max(r, 0.01)
            fd = (home_value_factor(spec, r + h) - home_value_factor(spec, r - h)) / (2 * h)
            assert home_value_deriv(spec, r) == pytest.approx(fd, rel=1e-8)

    def test_deriv_stable_under_step_halving(self, spec):
        r = 0.08
        fds = []
        for h in (1e-5, 5e-6, 2.5e-6):
            fds.append(
                (home_value_factor(spec, r + h) - home_value_factor(spec, r - h)) / (2 * h)
            )
        assert fds[0] == pytest.approx(fds[2], rel=1e-8)


class TestSpecValidation:
    @pytest.mark.parametrize(
        "bad",
        [
            dict(cash_scale=0.0),
            dict(spread=-0.01),
            dict(term=0.0),
            dict(prop_buy=0.0),
            dict(prop_sell=1.0),
            dict(prop_sell=0.0),
            dict(fixed_buy=0.0),
            dict(fixed_sell=-5.0),
        ],
    )
    def test_invariants(self, bad):
        base = dict(
            cash_scale=100_000.0,
            spread=0.01,
            term=30.0,
            prop_buy=0.06,
            prop_sell=0.06,
            fixed_buy=5000.0,
            fixed_sell=5000.0,
        )
        with pytest.raises(ConfigError):
            HousingSpec(**{**base, **bad})


class TestSellPayoff:
    def test_value_at_selling_region(self, spec):
        # frozen: v(0.026)*0.94 - 5000 from 40-digit arithmetic
        f = sell_payoff(spec)
        assert f.value(0.026) == pytest.approx(1719389.4608159922, rel=1e-12)

    def test_strictly_decreasing(self, spec):
        f = sell_payoff(spec)
        rs = np.geomspace(1e-4, 2.0, 80)
        vals = [f.value(r) for r in rs]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_negative_for_large_rates(self, spec):
        f = sell_payoff(spec)
        assert f.value(100.0) < 0.0

    def test_deriv_consistency(self, spec):
        f = sell_payoff(spec)
        for r in (0.03, 0.1, 0.5):
            h = 1e-6 * max(r, 0.01)
            fd = (f.value(r + h) - f.value(r - h)) / (2 * h)
            assert f.deriv(r) == pytest.approx(fd, rel=1e-6)


class TestBuyPayoff:
    def test_requires_solved_sell_value(self, spec):
        with pytest.raises(DependencyError):
            buy_payoff(spec, None)
        with pytest.raises(DependencyError):
            buy_payoff(spec, object())

    def test_negative_below_selling_threshold(self, housing, solved):
        # buying then instantly selling loses both rounds of costs
        f = solved["payoff_buy"]
        r_s = solved["thr_sell"].r_star
        for r in np.geomspace(1e-4, r_s, 20):
            assert f.value(r) < 0.0

    def test_positive_at_buying_threshold(self, solved):
        thr = solved["thr_buy"]
        assert solved["payoff_buy"].value(thr.r_star) > 0.0

    def test_deriv_matches_finite_difference_away_from_kink(self, solved):
        f = solved["payoff_buy"]
        r_s = solved["thr_sell"].r_star
        for r in (r_s / 2, 0.08, 0.167, 0.5):
            h = 1e-6 * max(r, 0.01)
            if abs(r - r_s) < 2 * h:
                continue
            fd = (f.value(r + h) - f.value(r - h)) / (2 * h)
            assert f.deriv(r) == pytest.approx(fd, rel=1e-6), r

    def test_dominated_by_sell_value(self, solved):
        f = solved["payoff_buy"]
        j_sell = solved["j_sell"]
        for r in np.geomspace(1e-3, 1.0, 40):
            assert f.value(r) <= j_sell.evaluate(r)
