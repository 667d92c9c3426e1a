"""Home-value factor, transaction costs, and the selling/buying reward functions.

The rate-dependent part of a home's value is

    v(r) = C/(r+rho) * (1 - exp(-(r+rho)*T)),

the price a buyer paying cash flow C over a T-year loan at rate r+rho can
afford.  Selling nets v(r)(1-delta_s) - K_s; buying costs v(r)(1+delta_b) + K_b,
so the buying reward nets the previously solved selling value against that cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import ConfigError, DependencyError

__all__ = [
    "HousingSpec",
    "Payoff",
    "home_value_factor",
    "home_value_deriv",
    "sell_payoff",
    "buy_payoff",
]


@dataclass(frozen=True)
class HousingSpec:
    """Cash-flow scale, mortgage spread/term, and transaction costs."""

    cash_scale: float  # C, currency/year
    spread: float  # rho, additive mortgage spread over the risk-free rate
    term: float  # T, loan repayment period in years
    prop_buy: float  # delta_b, proportional buying cost
    prop_sell: float  # delta_s, proportional selling cost
    fixed_buy: float  # K_b, fixed buying cost in currency
    fixed_sell: float  # K_s, fixed selling cost in currency

    def __post_init__(self):
        if self.cash_scale <= 0:
            raise ConfigError("cash_scale C must be positive")
        if self.spread <= 0:
            raise ConfigError("spread rho must be positive")
        if self.term <= 0:
            raise ConfigError("term T must be positive")
        if self.prop_buy <= 0:
            raise ConfigError("prop_buy delta_b must be positive")
        if not (0.0 < self.prop_sell < 1.0):
            raise ConfigError("prop_sell delta_s must lie in (0, 1)")
        if self.fixed_buy <= 0 or self.fixed_sell <= 0:
            raise ConfigError("fixed costs K_b, K_s must be positive")


@dataclass(frozen=True)
class Payoff:
    """Reward function f with analytic derivative; label is 'sell' or 'buy'."""

    value: Callable[[float], float]
    deriv: Callable[[float], float]
    label: str


def home_value_factor(spec: HousingSpec, r: float) -> float:
    """Rate-dependent home value v(r) = C/(r+rho) * (1 - exp(-(r+rho) T))."""
    x = r + spec.spread
    return spec.cash_scale / x * (1.0 - math.exp(-x * spec.term))


def home_value_deriv(spec: HousingSpec, r: float) -> float:
    """v'(r) = -C e^(-(r+rho)T)/(r+rho)^2 * (e^((r+rho)T) - 1 - (r+rho)T) < 0."""
    x = r + spec.spread
    xt = x * spec.term
    return -spec.cash_scale * math.exp(-xt) / x**2 * (math.expm1(xt) - xt)


def sell_payoff(spec: HousingSpec) -> Payoff:
    """Selling reward f_s(r) = v(r)(1 - delta_s) - K_s."""
    keep = 1.0 - spec.prop_sell

    def value(r: float) -> float:
        return home_value_factor(spec, r) * keep - spec.fixed_sell

    def deriv(r: float) -> float:
        return home_value_deriv(spec, r) * keep

    return Payoff(value=value, deriv=deriv, label="sell")


def buy_payoff(spec: HousingSpec, j_sell) -> Payoff:
    """Buying reward f_b(r) = J_s(r) - (v(r)(1 + delta_b) + K_b).

    j_sell must be the solved selling value function, exposing evaluate(r)
    and deriv(r); the derivative of f_b is assembled from its piecewise
    closed form rather than differenced.
    """
    if j_sell is None or not (hasattr(j_sell, "evaluate") and hasattr(j_sell, "deriv")):
        raise DependencyError(
            "buy_payoff requires the solved selling value function "
            "(object with evaluate(r) and deriv(r))"
        )
    mark = 1.0 + spec.prop_buy

    def value(r: float) -> float:
        return j_sell.evaluate(r) - (home_value_factor(spec, r) * mark + spec.fixed_buy)

    def deriv(r: float) -> float:
        return j_sell.deriv(r) - home_value_deriv(spec, r) * mark

    return Payoff(value=value, deriv=deriv, label="buy")
