"""CIR rate model, discounting modes, and the fundamental ODE solutions.

The discounted-generator ODE  (A - lam(r)) u = 0, with A the CIR generator
and lam(r) the discount rate ((chi-gamma)*r for stochastic discounting,
chi - gamma*r for constant discounting), has a positive increasing solution
u_plus and a positive decreasing solution u_minus:

    u_plus(r)  = exp(-nu r) M(alpha, beta, zeta r)
    u_minus(r) = exp(-nu r) U(alpha, beta, zeta r)

with mode-dependent (alpha, xi, zeta, nu) and beta = 2*kappa*theta/sigma^2.
The monotone transform g(r) = -u_minus(r)/u_plus(r) maps rates onto a
negative axis where optimal-stopping payoffs become concavity problems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from scipy.optimize import brentq

from .chf import DEFAULT_CONTROL, SeriesControl, kummer_m, tricomi_u
from .errors import ConfigError, DomainError, NumericalError

__all__ = [
    "DiscountMode",
    "CirParams",
    "DiscountSpec",
    "TransformParams",
    "FundamentalPair",
    "derive_transform",
    "fundamental_pair",
    "transform_g",
    "invert_g",
]


class DiscountMode(Enum):
    STOCHASTIC = "stochastic"
    CONSTANT = "constant"


@dataclass(frozen=True)
class CirParams:
    """Mean-reversion speed (1/years), long-run level and volatility of the rate."""

    kappa: float
    theta: float
    sigma: float

    def __post_init__(self):
        if self.kappa <= 0 or self.theta <= 0 or self.sigma <= 0:
            raise ConfigError("CIR parameters require kappa > 0, theta > 0, sigma > 0")
        if 2.0 * self.kappa * self.theta <= self.sigma**2:
            raise ConfigError(
                "Feller condition violated: need 2*kappa*theta > sigma^2 "
                f"(got {2 * self.kappa * self.theta:.6g} <= {self.sigma ** 2:.6g})"
            )

    @property
    def sigma2(self) -> float:
        return self.sigma**2

    def drift(self, r: float) -> float:
        return self.kappa * (self.theta - r)


@dataclass(frozen=True)
class DiscountSpec:
    """Discounting mode with investor rate chi and wage-growth factor gamma."""

    mode: DiscountMode
    chi: float
    gamma_wage: float

    def __post_init__(self):
        if self.chi <= 0 or self.gamma_wage <= 0:
            raise ConfigError("discounting requires chi > 0 and gamma > 0")
        if self.mode is DiscountMode.STOCHASTIC and self.chi <= self.gamma_wage:
            raise ConfigError(
                "stochastic discounting requires chi > gamma "
                f"(got chi={self.chi} <= gamma={self.gamma_wage})"
            )

    def rate(self, r: float) -> float:
        """Instantaneous discount rate lam(r) net of wage growth."""
        if self.mode is DiscountMode.STOCHASTIC:
            return (self.chi - self.gamma_wage) * r
        return self.chi - self.gamma_wage * r


@dataclass(frozen=True)
class TransformParams:
    """CHF parameters of the fundamental solutions plus density scales."""

    alpha: float
    beta: float
    xi: float
    zeta: float
    nu: float
    omega: float


def derive_transform(cir: CirParams, disc: DiscountSpec) -> TransformParams:
    """Map (CIR, discounting) onto the CHF parameterization of the ODE solutions."""
    k, th, s2 = cir.kappa, cir.theta, cir.sigma2
    beta = 2.0 * k * th / s2
    omega = beta / th  # = 2*kappa/sigma^2
    if disc.mode is DiscountMode.STOCHASTIC:
        xi = math.sqrt(k**2 + 2.0 * s2 * (disc.chi - disc.gamma_wage))
        alpha = (k * th / s2) * (1.0 - k / xi)
    else:
        disc_gap = k**2 - 2.0 * disc.gamma_wage * s2
        if disc_gap <= 0.0:
            raise ConfigError(
                "constant discounting requires kappa^2 > 2*gamma*sigma^2 "
                f"(got {k ** 2:.6g} <= {2 * disc.gamma_wage * s2:.6g})"
            )
        xi = math.sqrt(disc_gap)
        chi_min = 0.5 * beta * (k - xi)
        if disc.chi <= chi_min:
            raise ConfigError(
                "constant discounting requires chi > (beta/2)*(kappa - "
                f"sqrt(kappa^2 - 2*gamma*sigma^2)) = {chi_min:.6g} (got chi={disc.chi})"
            )
        alpha = (k * th / s2) * (1.0 - (k - s2 * disc.chi / (k * th)) / xi)
    zeta = 2.0 * xi / s2
    nu = (xi - k) / s2
    return TransformParams(alpha=alpha, beta=beta, xi=xi, zeta=zeta, nu=nu, omega=omega)


class FundamentalPair:
    """Evaluators for u_plus, u_minus and their analytic first derivatives.

    Immutable after construction; evaluation is pure.
    """

    def __init__(
        self,
        cir: CirParams,
        disc: DiscountSpec,
        ctl: SeriesControl | None = None,
    ):
        self.cir = cir
        self.disc = disc
        self.ctl = ctl or DEFAULT_CONTROL
        self.params = derive_transform(cir, disc)

    def _check_rate(self, r: float) -> None:
        if r <= 0.0:
            raise DomainError(f"rate must be positive, got r={r}")

    def u_plus(self, r: float) -> float:
        self._check_rate(r)
        p = self.params
        return math.exp(-p.nu * r) * kummer_m(p.alpha, p.beta, p.zeta * r, self.ctl)

    def u_minus(self, r: float) -> float:
        self._check_rate(r)
        p = self.params
        return math.exp(-p.nu * r) * tricomi_u(p.alpha, p.beta, p.zeta * r, self.ctl)

    def u_plus_prime(self, r: float) -> float:
        self._check_rate(r)
        p = self.params
        m0 = kummer_m(p.alpha, p.beta, p.zeta * r, self.ctl)
        m1 = kummer_m(p.alpha + 1.0, p.beta + 1.0, p.zeta * r, self.ctl)
        return math.exp(-p.nu * r) * (-p.nu * m0 + (p.alpha * p.zeta / p.beta) * m1)

    def u_minus_prime(self, r: float) -> float:
        self._check_rate(r)
        p = self.params
        u0 = tricomi_u(p.alpha, p.beta, p.zeta * r, self.ctl)
        u1 = tricomi_u(p.alpha + 1.0, p.beta + 1.0, p.zeta * r, self.ctl)
        return math.exp(-p.nu * r) * (-p.nu * u0 - p.alpha * p.zeta * u1)


def fundamental_pair(
    cir: CirParams, disc: DiscountSpec, ctl: SeriesControl | None = None
) -> FundamentalPair:
    """Construct the (u_plus, u_minus) evaluator pair, validating the mode eagerly."""
    return FundamentalPair(cir, disc, ctl)


def transform_g(pair: FundamentalPair, r: float) -> float:
    """g(r) = -u_minus(r)/u_plus(r): strictly negative, strictly increasing."""
    up = pair.u_plus(r)
    if up == 0.0:
        raise NumericalError(f"u_plus({r}) underflowed; g undefined")
    return -pair.u_minus(r) / up


def invert_g(pair: FundamentalPair, q: float) -> float:
    """Inverse of the monotone transform g, by bracketing and Brent refinement."""
    if q >= 0.0:
        raise DomainError(f"g takes negative values only, got q={q}")

    def f(r: float) -> float:
        return transform_g(pair, r) - q

    # geometric expansion from the long-run level until the root is bracketed
    lo = hi = pair.cir.theta
    flo = fhi = f(lo)
    for _ in range(200):
        if flo <= 0.0:
            break
        lo /= 1.9
        flo = f(lo)
    else:
        raise DomainError(f"q={q} below the range of g (r -> 0 limit)")
    for _ in range(200):
        if fhi >= 0.0:
            break
        hi *= 1.9
        fhi = f(hi)
    else:
        raise DomainError(f"q={q} above the range of g (r -> inf limit)")
    if lo == hi:
        return lo
    root = brentq(f, lo, hi, xtol=1e-300, rtol=8.9e-16, maxiter=200)
    return float(root)
