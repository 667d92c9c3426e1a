"""Threshold solver and value functions for the discounted stopping problems.

Under the transform q = g(r), the stopping value is u_plus(r) * hhat(g(r))
where hhat is the smallest decreasing nonnegative concave majorant of
h(q) = f(g^{-1}(q)) / u_plus(g^{-1}(q)).  For the selling problem the
majorant is h itself up to a tangency point q_s and the tangent line through
the origin beyond it; for the buying problem it is flat at the maximum of
h_b up to the critical point q_b and h_b itself beyond.  Both free points
reduce to one-dimensional root equations in the rate variable:

    sell:  u_minus'(r)/u_minus(r) = f_s'(r)/f_s(r)
    buy:   u_plus'(r)/u_plus(r)   = f_b'(r)/f_b(r)

solved on the region where the reward is positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .chf import SeriesControl, kummer_m, tricomi_u
from .errors import BracketError, DomainError, NumericalError
from .housing import Payoff
from .rates import FundamentalPair, invert_g, transform_g

__all__ = [
    "LimitCheck",
    "ThresholdResult",
    "ValueFunction",
    "transform_h",
    "h_derivatives",
    "check_limits",
    "solve_sell_threshold",
    "solve_buy_threshold",
    "value_sell",
    "value_buy",
    "make_value_function",
]

SCAN_LO = 1e-4
SCAN_HI = 2.0
SCAN_POINTS = 400

_LOW_GRID = (1e-3, 1e-4, 1e-5, 1e-6)
_HIGH_GRID = (10.0, 100.0, 1000.0)


@dataclass(frozen=True)
class LimitCheck:
    """Boundary limits of f+/u- (left) and f+/u+ (right), with their samples."""

    ell_x: float
    ell_y: float
    passed: bool
    samples_x: tuple
    samples_y: tuple


@dataclass(frozen=True)
class ThresholdResult:
    """Solved free boundary with its transformed/inflection locations."""

    r_star: float
    q_star: float
    q_inflect: float
    residual: float
    bracket: tuple


@dataclass(frozen=True)
class ValueFunction:
    """Stopping value with analytic derivative and continuation indicator."""

    evaluate: Callable[[float], float]
    deriv: Callable[[float], float]
    threshold: ThresholdResult
    kind: str
    continuation: Callable[[float], bool]


def transform_h(pair: FundamentalPair, payoff: Payoff, q: float) -> float:
    """h(q) = f(g^{-1}(q)) / u_plus(g^{-1}(q))."""
    r = invert_g(pair, q)
    return payoff.value(r) / pair.u_plus(r)


def _g_prime(pair: FundamentalPair, r: float) -> float:
    up = pair.u_plus(r)
    return (pair.u_plus_prime(r) * pair.u_minus(r) - up * pair.u_minus_prime(r)) / up**2


def _payoff_second_deriv(payoff: Payoff, r: float) -> float:
    step = 1e-5 * max(r, 1e-3)
    return (payoff.deriv(r + step) - payoff.deriv(r - step)) / (2.0 * step)


def _generator_gap(pair: FundamentalPair, payoff: Payoff, r: float) -> float:
    """(A - lam(r)) f(r): drift*f' + (sigma^2 r / 2) f'' - lam(r) f."""
    cir = pair.cir
    fpp = _payoff_second_deriv(payoff, r)
    return (
        cir.drift(r) * payoff.deriv(r)
        + 0.5 * cir.sigma2 * r * fpp
        - pair.disc.rate(r) * payoff.value(r)
    )


def h_derivatives(pair: FundamentalPair, payoff: Payoff, q: float):
    """First and second derivative of h at q (second via differenced f')."""
    r = invert_g(pair, q)
    up = pair.u_plus(r)
    gp = _g_prime(pair, r)
    h_prime = (up * payoff.deriv(r) - pair.u_plus_prime(r) * payoff.value(r)) / (
        gp * up**2
    )
    h_double = (
        2.0
        / (pair.cir.sigma2 * r * up * gp**2)
        * _generator_gap(pair, payoff, r)
    )
    return h_prime, h_double


def _u_plus_big(pair: FundamentalPair, r: float) -> float:
    """u_plus for large arguments: enlarges the term budget with z."""
    p = pair.params
    z = p.zeta * r
    need = int(z + 20.0 * math.sqrt(max(z, 1.0)) + 200)
    ctl = pair.ctl
    if need > ctl.max_terms:
        ctl = SeriesControl(max_terms=need, rel_tol=ctl.rel_tol, quad_nodes=ctl.quad_nodes)
    return math.exp(-p.nu * r) * kummer_m(p.alpha, p.beta, z, ctl)


def _u_minus_small(pair: FundamentalPair, r: float) -> float:
    p = pair.params
    return math.exp(-p.nu * r) * tricomi_u(p.alpha, p.beta, p.zeta * r, pair.ctl)


def _limit_sequence(values) -> float:
    """Declared limit of a boundary sample sequence (0, finite, or error)."""
    initial = values[0]
    if initial == 0.0:
        if any(v != 0.0 for v in values):
            raise NumericalError(f"inconclusive boundary limit: samples {values}")
        return 0.0
    prev = initial
    for v in values[1:]:
        if v > prev * (1.0 + 1e-2):
            raise NumericalError(
                f"inconclusive boundary limit: non-monotone samples {values}"
            )
        prev = v
    return 0.0 if values[-1] <= 1e-8 * initial else values[-1]


def check_limits(pair: FundamentalPair, payoff: Payoff) -> LimitCheck:
    """Evaluate the boundary conditions f+/u- (r -> 0) and f+/u+ (r -> inf)."""
    sx = []
    for r in _LOW_GRID:
        fp = max(payoff.value(r), 0.0)
        sx.append(0.0 if fp == 0.0 else fp / _u_minus_small(pair, r))
    sy = []
    for r in _HIGH_GRID:
        fp = max(payoff.value(r), 0.0)
        sy.append(0.0 if fp == 0.0 else fp / _u_plus_big(pair, r))
    ell_x = _limit_sequence(tuple(sx))
    ell_y = _limit_sequence(tuple(sy))
    passed = math.isfinite(ell_x) and math.isfinite(ell_y)
    return LimitCheck(
        ell_x=ell_x, ell_y=ell_y, passed=passed, samples_x=tuple(sx), samples_y=tuple(sy)
    )


def _scan_brackets(func, grid, positive_mask):
    """Sign-change brackets of func over consecutive grid points where the payoff is positive."""
    brackets = []
    vals = [func(r) if ok else math.nan for r, ok in zip(grid, positive_mask)]
    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if math.isnan(a) or math.isnan(b):
            continue
        if a == 0.0:
            brackets.append((grid[i], grid[i]))
        elif a * b < 0.0:
            brackets.append((grid[i], grid[i + 1]))
    return brackets


def _refine_root(func, lo: float, hi: float) -> float:
    if lo == hi:
        return lo
    return float(brentq(func, lo, hi, xtol=1e-12, rtol=8.9e-16, maxiter=200))


def _root_equation_residual(urat: float, frat: float) -> float:
    denom = abs(urat) + abs(frat)
    return abs(urat - frat) / denom if denom > 0 else 0.0


def _first_inflection(pair, payoff, r_lo, r_hi, n=200):
    """Leftmost sign change of (A - lam) f on (r_lo, r_hi], refined by Brent."""
    grid = np.geomspace(r_lo, r_hi, n)
    prev_r = grid[0]
    prev_v = _generator_gap(pair, payoff, prev_r)
    for r in grid[1:]:
        v = _generator_gap(pair, payoff, r)
        if prev_v == 0.0:
            return prev_r
        if prev_v * v < 0.0:
            return _refine_root(lambda x: _generator_gap(pair, payoff, x), prev_r, r)
        prev_r, prev_v = r, v
    raise BracketError(
        f"no inflection of h'' found in ({r_lo:.6g}, {r_hi:.6g}) for {payoff.label}"
    )


def solve_sell_threshold(pair: FundamentalPair, payoff_sell: Payoff) -> ThresholdResult:
    """Selling threshold: unique root of u_minus'/u_minus = f_s'/f_s with f_s > 0."""
    grid = np.geomspace(SCAN_LO, SCAN_HI, SCAN_POINTS)
    mask = [payoff_sell.value(r) > 0.0 for r in grid]
    if not any(mask):
        raise BracketError("selling payoff is nowhere positive on the scan grid")

    def equation(r: float) -> float:
        return pair.u_minus_prime(r) / pair.u_minus(r) - payoff_sell.deriv(
            r
        ) / payoff_sell.value(r)

    brackets = _scan_brackets(equation, grid, mask)
    if not brackets:
        raise BracketError("no sign change of the selling threshold equation")
    if len(brackets) > 1:
        raise BracketError(
            f"multiple selling-threshold candidates on the scan grid: {brackets}"
        )
    r_star = _refine_root(equation, *brackets[0])

    urat = pair.u_minus_prime(r_star) / pair.u_minus(r_star)
    frat = payoff_sell.deriv(r_star) / payoff_sell.value(r_star)
    residual = _root_equation_residual(urat, frat)

    # tangency identity h_s(q_s)/q_s = h_s'(q_s), written in rate variables
    t1 = -payoff_sell.value(r_star) / pair.u_minus(r_star)
    wron = (
        pair.u_plus_prime(r_star) * pair.u_minus(r_star)
        - pair.u_plus(r_star) * pair.u_minus_prime(r_star)
    )
    t2 = (
        payoff_sell.deriv(r_star) * pair.u_plus(r_star)
        - payoff_sell.value(r_star) * pair.u_plus_prime(r_star)
    ) / wron
    if abs(t1 - t2) > 1e-8 * max(abs(t1), abs(t2)):
        raise NumericalError(
            f"tangency identity violated at r_s={r_star:.8g}: {t1:.12g} vs {t2:.12g}"
        )

    q_star = transform_g(pair, r_star)
    r_inflect = _first_inflection(pair, payoff_sell, r_star * 1.01, SCAN_HI)
    q_inflect = transform_g(pair, r_inflect)
    if not q_star < q_inflect:
        raise NumericalError(
            f"selling ordering violated: expected q_s < q_s* "
            f"(got {q_star:.6g} >= {q_inflect:.6g})"
        )
    return ThresholdResult(
        r_star=r_star,
        q_star=q_star,
        q_inflect=q_inflect,
        residual=residual,
        bracket=tuple(brackets[0]),
    )


def solve_buy_threshold(
    pair: FundamentalPair,
    payoff_buy: Payoff,
    sell_threshold: ThresholdResult | None = None,
) -> ThresholdResult:
    """Buying threshold: unique root of u_plus'/u_plus = f_b'/f_b with f_b > 0."""
    grid = np.geomspace(SCAN_LO, SCAN_HI, SCAN_POINTS)
    mask = [payoff_buy.value(r) > 0.0 for r in grid]
    if not any(mask):
        raise BracketError("buying payoff is nowhere positive on the scan grid")

    def equation(r: float) -> float:
        return pair.u_plus_prime(r) / pair.u_plus(r) - payoff_buy.deriv(
            r
        ) / payoff_buy.value(r)

    brackets = _scan_brackets(equation, grid, mask)
    if not brackets:
        raise BracketError("no sign change of the buying threshold equation")
    if len(brackets) > 1:
        raise BracketError(
            f"multiple buying-threshold candidates on the scan grid: {brackets}"
        )
    r_star = _refine_root(equation, *brackets[0])
    if sell_threshold is not None and r_star <= sell_threshold.r_star:
        raise NumericalError(
            f"threshold ordering violated: r_b={r_star:.6g} <= r_s={sell_threshold.r_star:.6g}"
        )

    urat = pair.u_plus_prime(r_star) / pair.u_plus(r_star)
    frat = payoff_buy.deriv(r_star) / payoff_buy.value(r_star)
    residual = _root_equation_residual(urat, frat)

    # critical-point characterization: numerator of h_b'(q_b) vanishes
    num = pair.u_plus(r_star) * payoff_buy.deriv(r_star) - pair.u_plus_prime(
        r_star
    ) * payoff_buy.value(r_star)
    scale = abs(pair.u_plus(r_star) * payoff_buy.deriv(r_star)) + abs(
        pair.u_plus_prime(r_star) * payoff_buy.value(r_star)
    )
    if scale > 0 and abs(num) / scale > 1e-8:
        raise NumericalError(
            f"critical-point residual of h_b' at q_b exceeds 1e-8: {abs(num) / scale:.3g}"
        )

    q_star = transform_g(pair, r_star)
    # the inflection of h_b sits below the critical point
    lo = SCAN_LO
    if sell_threshold is not None:
        lo = max(lo, sell_threshold.r_star * 1.05)
    r_inflect = _first_inflection(pair, payoff_buy, lo, r_star * 0.999)
    q_inflect = transform_g(pair, r_inflect)
    if not q_inflect < q_star:
        raise NumericalError(
            f"buying ordering violated: expected q_b* < q_b "
            f"(got {q_inflect:.6g} >= {q_star:.6g})"
        )
    return ThresholdResult(
        r_star=r_star,
        q_star=q_star,
        q_inflect=q_inflect,
        residual=residual,
        bracket=tuple(brackets[0]),
    )


def value_sell(
    pair: FundamentalPair, payoff_sell: Payoff, thr: ThresholdResult, r: float
) -> float:
    """J_s(r): reward below the threshold, u_minus-proportional continuation above."""
    if r <= thr.r_star:
        return payoff_sell.value(r)
    return payoff_sell.value(thr.r_star) * pair.u_minus(r) / pair.u_minus(thr.r_star)


def value_buy(
    pair: FundamentalPair, payoff_buy: Payoff, thr: ThresholdResult, r: float
) -> float:
    """J_b(r): u_plus-proportional continuation below the threshold, reward above."""
    if r <= thr.r_star:
        return payoff_buy.value(thr.r_star) * pair.u_plus(r) / pair.u_plus(thr.r_star)
    return payoff_buy.value(r)


def make_value_function(
    pair: FundamentalPair, payoff: Payoff, thr: ThresholdResult, kind: str
) -> ValueFunction:
    """Bundle a solved threshold into an immutable value-function object."""
    if kind == "sell":
        f_star = payoff.value(thr.r_star)
        u_star = pair.u_minus(thr.r_star)

        def evaluate(r: float) -> float:
            if r <= thr.r_star:
                return payoff.value(r)
            return f_star * pair.u_minus(r) / u_star

        def deriv(r: float) -> float:
            if r <= thr.r_star:
                return payoff.deriv(r)
            return f_star * pair.u_minus_prime(r) / u_star

        def continuation(r: float) -> bool:
            return r > thr.r_star

    elif kind == "buy":
        f_star = payoff.value(thr.r_star)
        u_star = pair.u_plus(thr.r_star)

        def evaluate(r: float) -> float:
            if r <= thr.r_star:
                return f_star * pair.u_plus(r) / u_star
            return payoff.value(r)

        def deriv(r: float) -> float:
            if r <= thr.r_star:
                return f_star * pair.u_plus_prime(r) / u_star
            return payoff.deriv(r)

        def continuation(r: float) -> bool:
            return r < thr.r_star

    else:
        raise DomainError(f"kind must be 'sell' or 'buy', got {kind!r}")

    return ValueFunction(
        evaluate=evaluate,
        deriv=deriv,
        threshold=thr,
        kind=kind,
        continuation=continuation,
    )
