"""Shared fixtures: the baseline model solved once per session."""

import math

import pytest

from cirstop import (
    CirParams,
    DiscountMode,
    DiscountSpec,
    HousingSpec,
    buy_payoff,
    fundamental_pair,
    sell_payoff,
)
from cirstop.hitting import HittingKind, density, density_with_mass_control, find_eigenvalues
from cirstop.stopping import make_value_function, solve_buy_threshold, solve_sell_threshold


@pytest.fixture(scope="session")
def cir():
    return CirParams(kappa=0.9, theta=0.08 / 0.9, sigma=math.sqrt(0.033))


@pytest.fixture(scope="session")
def disc():
    return DiscountSpec(mode=DiscountMode.STOCHASTIC, chi=0.6, gamma_wage=0.4)


@pytest.fixture(scope="session")
def disc_const():
    return DiscountSpec(mode=DiscountMode.CONSTANT, chi=0.6, gamma_wage=0.4)


@pytest.fixture(scope="session")
def housing():
    return HousingSpec(
        cash_scale=100_000.0,
        spread=0.01,
        term=30.0,
        prop_buy=0.06,
        prop_sell=0.06,
        fixed_buy=5000.0,
        fixed_sell=5000.0,
    )


@pytest.fixture(scope="session")
def pair(cir, disc):
    return fundamental_pair(cir, disc)


@pytest.fixture(scope="session")
def solved(pair, housing):
    """Thresholds and value functions for the baseline problem."""
    payoff_sell = sell_payoff(housing)
    thr_sell = solve_sell_threshold(pair, payoff_sell)
    j_sell = make_value_function(pair, payoff_sell, thr_sell, "sell")
    payoff_buy = buy_payoff(housing, j_sell)
    thr_buy = solve_buy_threshold(pair, payoff_buy, thr_sell)
    j_buy = make_value_function(pair, payoff_buy, thr_buy, "buy")
    return {
        "payoff_sell": payoff_sell,
        "payoff_buy": payoff_buy,
        "thr_sell": thr_sell,
        "thr_buy": thr_buy,
        "j_sell": j_sell,
        "j_buy": j_buy,
    }


@pytest.fixture(scope="session")
def dens_buy(pair, cir):
    """100-term buy-side waiting density at the 3-decimal threshold levels."""
    eig = find_eigenvalues(HittingKind.BUY_UP, 0.167, 100, pair.params)
    return density(HittingKind.BUY_UP, eig, 0.08, cir.kappa)


@pytest.fixture(scope="session")
def dens_sell(pair, cir):
    eig = find_eigenvalues(HittingKind.SELL_DOWN, 0.026, 100, pair.params)
    return density(HittingKind.SELL_DOWN, eig, 0.167, cir.kappa)


@pytest.fixture(scope="session")
def dens_buy_norm(pair, cir, dens_buy):
    return density_with_mass_control(
        HittingKind.BUY_UP, 0.167, 0.08, cir.kappa, pair.params, initial=dens_buy
    )


@pytest.fixture(scope="session")
def dens_sell_norm(pair, cir, dens_sell):
    return density_with_mass_control(
        HittingKind.SELL_DOWN, 0.026, 0.167, cir.kappa, pair.params, initial=dens_sell
    )
