"""Optimal home buy/sell timing under CIR interest rates.

Solves the nested optimal-stopping problem for an investor who buys a home
when the risk-free rate rises to a threshold and sells when it falls to a
lower one, with home values driven by a CIR rate process.  Provides the
threshold solver, value functions, first-passage waiting-time densities,
and an independent Monte Carlo validator.
"""

from .chf import SeriesControl, chf_deriv_a, chf_deriv_z, gamma, kummer_m, tricomi_u
from .errors import (
    BracketError,
    CirstopError,
    ConfigError,
    ConvergenceError,
    DependencyError,
    DomainError,
    NumericalError,
    OverflowSignal,
    PoleError,
    ValidationFailure,
)
from .hitting import (
    ConvolvedDensity,
    DensitySeries,
    EigenSeries,
    HittingKind,
    convolution_density,
    density,
    density_with_mass_control,
    find_eigenvalues,
)
from .housing import (
    HousingSpec,
    Payoff,
    buy_payoff,
    home_value_deriv,
    home_value_factor,
    sell_payoff,
)
from .mc import (
    Direction,
    PathStats,
    Scheme,
    SimConfig,
    estimate_strategy_value,
    ks_statistic,
    simulate_hitting,
)
from .rates import (
    CirParams,
    DiscountMode,
    DiscountSpec,
    FundamentalPair,
    TransformParams,
    derive_transform,
    fundamental_pair,
    invert_g,
    transform_g,
)
from .stopping import (
    LimitCheck,
    ThresholdResult,
    ValueFunction,
    check_limits,
    h_derivatives,
    make_value_function,
    solve_buy_threshold,
    solve_sell_threshold,
    transform_h,
    value_buy,
    value_sell,
)

__version__ = "0.1.0"
