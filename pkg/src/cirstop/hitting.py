"""First-passage-time densities for the CIR rate via eigenfunction expansions.

The density of the first hitting time of level y from r is a sum of
exponentials exp(kappa*k_n*t) whose decay rates k_n are the negative roots
in the first parameter of

    M(k, beta, omega*y) = 0    (hitting from below, "buy-up"), or
    U(k, beta, omega*y) = 0    (hitting from above, "sell-down"),

with beta = 2*kappa*theta/sigma^2 and omega = beta/theta.  Buy-up roots
spread quadratically (k_n ~ -n^2), sell-down roots linearly (k_n ~ -n).
The series weights require the k-derivative of M or U at each root, taken
by central differences.

Coefficient sums converge only conditionally, so a fixed truncation can
leave a percent-level normalization defect; density_with_mass_control picks
the truncation depth that brings the total mass within a target of one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import mpmath as mp
import numpy as np
from scipy.optimize import brentq

from .chf import DEFAULT_CONTROL, SeriesControl, _tricomi_u_mpf, chf_deriv_a, kummer_m
from .errors import BracketError, DomainError, NumericalError
from .rates import TransformParams

__all__ = [
    "HittingKind",
    "EigenSeries",
    "DensitySeries",
    "find_eigenvalues",
    "density",
    "density_with_mass_control",
    "convolution_density",
    "ConvolvedDensity",
]

T_MIN = 1e-4  # years; the truncated series oscillates below this cutoff

_SCAN_STEP0 = 0.25
_GAP_JUMP_LIMIT = 0.75  # relative gap jump that flags a missed root


class HittingKind(Enum):
    BUY_UP = "buy_up"
    SELL_DOWN = "sell_down"


@dataclass(frozen=True)
class EigenSeries:
    """Negative eigenvalue roots for one hitting problem."""

    kind: HittingKind
    level: float
    roots: np.ndarray  # strictly decreasing, all negative
    n_terms: int
    omega: float
    beta: float


@dataclass(frozen=True)
class DensitySeries:
    """Truncated spectral density of a hitting time, with closed-form mean."""

    eigen: EigenSeries
    start: float
    kappa: float
    coeffs: np.ndarray

    def evaluate(self, t):
        """Density at t (scalar or array), valid for t >= 1e-4 years."""
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < T_MIN):
            raise DomainError(
                f"density series is only uniformly convergent for t >= {T_MIN}"
            )
        k = self.eigen.roots
        w = -self.kappa * self.coeffs * k
        out = np.exp(np.multiply.outer(t_arr, self.kappa * k)) @ w
        return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out

    def cdf(self, t):
        """P(tau <= t) from termwise integration over [0, t]."""
        t_arr = np.asarray(t, dtype=float)
        k = self.eigen.roots
        out = self.coeffs.sum() - np.exp(
            np.multiply.outer(t_arr, self.kappa * k)
        ) @ self.coeffs
        return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out

    def mass(self, t0: float = 0.0, t1: float = math.inf) -> float:
        """Termwise integral of the truncated density over [t0, t1]."""
        k = self.kappa * self.eigen.roots
        lo = np.exp(k * t0)
        hi = np.exp(k * t1) if math.isfinite(t1) else 0.0
        return float(np.sum(self.coeffs * (lo - hi)))

    @property
    def mean(self) -> float:
        """Expected hitting time -(1/kappa) * sum m_n / k_n."""
        return -float(np.sum(self.coeffs / self.eigen.roots)) / self.kappa


def _eigen_function(kind: HittingKind, beta: float, z: float, ctl: SeriesControl):
    """Float-valued eigenfunction of k with the roots of M or U.

    U's amplitude grows factorially as k decreases (its Gamma-relation
    prefactors overwhelm the double range near k ~ -170), so the sell-down
    branch is rescaled by 1/Gamma(1-k) > 0, which keeps the same zeros and
    signs while staying representable.
    """
    if kind is HittingKind.BUY_UP:
        return lambda k: kummer_m(k, beta, z, ctl)

    def scaled_u(k: float) -> float:
        return float(_tricomi_u_mpf(k, beta, z, ctl) * mp.rgamma(1.0 - k))

    return scaled_u


def _eigen_ctl(ctl: SeriesControl) -> SeriesControl:
    # deep negative first parameters need a far larger term budget than the
    # model's own u-evaluations; the cap only binds if convergence stalls
    if ctl.max_terms >= 20_000:
        return ctl
    return SeriesControl(max_terms=20_000, rel_tol=ctl.rel_tol, quad_nodes=ctl.quad_nodes)


def _check_spacing(roots: np.ndarray, kind: HittingKind) -> None:
    gaps = -np.diff(roots)  # positive
    if np.any(gaps <= 0):
        raise NumericalError("eigenvalue roots are not strictly decreasing")
    for i in range(1, len(gaps)):
        if kind is HittingKind.BUY_UP:
            # quadratic spacing: gaps must grow; a skipped root reverses that
            if gaps[i] < gaps[i - 1] * 0.999:
                raise BracketError(
                    f"suspected missed buy-up eigenvalue near root {i + 1}: "
                    f"gap shrank from {gaps[i - 1]:.4g} to {gaps[i]:.4g}"
                )
        else:
            jump = abs(gaps[i] - gaps[i - 1]) / gaps[i - 1]
            if jump > _GAP_JUMP_LIMIT:
                raise BracketError(
                    f"suspected missed sell-down eigenvalue near root {i + 1}: "
                    f"gap jumped from {gaps[i - 1]:.4g} to {gaps[i]:.4g}"
                )


def find_eigenvalues(
    kind: HittingKind,
    level: float,
    n_terms: int,
    params: TransformParams,
    ctl: SeriesControl | None = None,
) -> EigenSeries:
    """First n_terms negative roots of M or U in the first parameter."""
    if level <= 0.0:
        raise DomainError(f"threshold level must be positive, got {level}")
    if n_terms < 1:
        raise DomainError("n_terms must be >= 1")
    ctl = _eigen_ctl(ctl or DEFAULT_CONTROL)
    z = params.omega * level
    func = _eigen_function(kind, params.beta, z, ctl)

    roots = []
    k = -1e-9
    f_prev = func(k)
    step = _SCAN_STEP0
    max_scan = 500_000
    for _ in range(max_scan):
        if len(roots) >= n_terms:
            break
        k_next = k - step
        f_next = func(k_next)
        if f_prev == 0.0:
            roots.append(k)
        elif f_prev * f_next < 0.0:
            roots.append(
                float(brentq(func, k_next, k, xtol=1e-12, rtol=8.9e-16, maxiter=200))
            )
        k, f_prev = k_next, f_next
        if len(roots) >= 2:
            # track the local gap; widens automatically in the quadratic case
            step = max(_SCAN_STEP0, 0.2 * (roots[-2] - roots[-1]))
    else:
        raise BracketError(
            f"eigenvalue scan exhausted after {max_scan} steps "
            f"({len(roots)}/{n_terms} roots found)"
        )

    arr = np.array(roots[:n_terms], dtype=float)
    # guard against a pair of roots hiding inside the very first scan step
    probe = np.linspace(arr[0], -1e-9, 9)[1:-1]
    signs = np.sign([func(float(p)) for p in probe])
    if np.any(signs == 0.0) or np.any(np.diff(signs) != 0.0):
        raise BracketError(
            f"additional {kind.value} eigenvalue detected between the first root and zero"
        )
    _check_spacing(arr, kind)
    return EigenSeries(
        kind=kind, level=level, roots=arr, n_terms=n_terms, omega=params.omega, beta=params.beta
    )


def density(
    kind: HittingKind,
    eigen: EigenSeries,
    start: float,
    kappa: float,
    ctl: SeriesControl | None = None,
) -> DensitySeries:
    """Spectral coefficients and density for a hitting time started at `start`."""
    if kind is not eigen.kind:
        raise DomainError(f"eigen series is for {eigen.kind.value}, not {kind.value}")
    if kind is HittingKind.BUY_UP and not start < eigen.level:
        raise DomainError(
            f"buy-up density requires start < level (got {start} >= {eigen.level})"
        )
    if kind is HittingKind.SELL_DOWN and not start > eigen.level:
        raise DomainError(
            f"sell-down density requires start > level (got {start} <= {eigen.level})"
        )
    ctl = _eigen_ctl(ctl or DEFAULT_CONTROL)
    z_level = eigen.omega * eigen.level
    z_start = eigen.omega * start

    coeffs = np.empty(eigen.n_terms)
    if kind is HittingKind.BUY_UP:
        for i, k in enumerate(eigen.roots):
            dk = chf_deriv_a("M", float(k), eigen.beta, z_level, ctl=ctl)
            if dk == 0.0:
                raise NumericalError(
                    f"d/dk of the eigenfunction vanishes at root {k}: not a simple root"
                )
            coeffs[i] = -kummer_m(float(k), eigen.beta, z_start, ctl) / (k * dk)
    else:
        # U's magnitude leaves the double range at deep roots while the
        # coefficient ratio stays O(1/n): form numerator, the central
        # k-difference and the quotient in mp, then round
        for i, k in enumerate(eigen.roots):
            k = float(k)
            h = 1e-6 * max(1.0, abs(k))
            d1 = (
                _tricomi_u_mpf(k + h, eigen.beta, z_level, ctl)
                - _tricomi_u_mpf(k - h, eigen.beta, z_level, ctl)
            ) / (2.0 * h)
            d2 = (
                _tricomi_u_mpf(k + 0.5 * h, eigen.beta, z_level, ctl)
                - _tricomi_u_mpf(k - 0.5 * h, eigen.beta, z_level, ctl)
            ) / h
            if d1 == 0:
                raise NumericalError(
                    f"d/dk of the eigenfunction vanishes at root {k}: not a simple root"
                )
            if abs(d2 - d1) > 1e-4 * abs(d2):
                raise NumericalError(
                    f"k-derivative of U unstable under step halving at root {k}"
                )
            num = _tricomi_u_mpf(k, eigen.beta, z_start, ctl)
            coeffs[i] = float(-num / (mp.mpf(k) * d1))
    return DensitySeries(eigen=eigen, start=start, kappa=kappa, coeffs=coeffs)


def density_with_mass_control(
    kind: HittingKind,
    level: float,
    start: float,
    kappa: float,
    params: TransformParams,
    ctl: SeriesControl | None = None,
    mass_tol: float = 5e-4,
    n_min: int = 50,
    n_max: int = 400,
    initial: DensitySeries | None = None,
) -> DensitySeries:
    """Density truncated where the total mass is closest to one.

    The coefficient sums converge only conditionally (partial sums oscillate
    around one), so the truncation depth in [n_min, n_max] with the smallest
    normalization defect is used; the search deepens lazily and fails if the
    defect still exceeds mass_tol at n_max.  An already-computed series for
    the same (kind, level, start) seeds the search.
    """
    n_try = max(2 * n_min, 100)
    best_density = None
    best_defect = math.inf
    if (
        initial is not None
        and initial.eigen.kind is kind
        and initial.eigen.level == level
        and initial.start == start
        and initial.kappa == kappa
        and initial.eigen.n_terms >= n_min
    ):
        n_try = max(n_try, initial.eigen.n_terms)
    else:
        initial = None
    while True:
        n_try = min(n_try, n_max)
        if initial is not None and initial.eigen.n_terms >= n_try:
            eigen, full = initial.eigen, initial
            initial = None
        else:
            eigen = find_eigenvalues(kind, level, n_try, params, ctl)
            full = density(kind, eigen, start, kappa, ctl)
        partial = np.cumsum(full.coeffs)
        window = np.abs(partial[n_min - 1 :] - 1.0)
        best = int(np.argmin(window)) + n_min
        defect = float(window[best - n_min])
        if defect < best_defect:
            best_defect = defect
            trimmed = EigenSeries(
                kind=eigen.kind,
                level=eigen.level,
                roots=eigen.roots[:best],
                n_terms=best,
                omega=eigen.omega,
                beta=eigen.beta,
            )
            best_density = DensitySeries(
                eigen=trimmed, start=start, kappa=kappa, coeffs=full.coeffs[:best]
            )
        if best_defect <= mass_tol:
            return best_density
        if n_try >= n_max:
            raise NumericalError(
                f"density mass defect {best_defect:.3g} exceeds {mass_tol:.3g} "
                f"for every truncation in [{n_min}, {n_max}]"
            )
        n_try *= 2


def convolution_density(buy: DensitySeries, sell: DensitySeries, t: float) -> float:
    """Density of the sum of the two waiting times at t >= 0."""
    if buy.kappa != sell.kappa:
        raise DomainError("convolution requires a common mean-reversion speed")
    if t < 0.0:
        raise DomainError(f"time must be nonnegative, got t={t}")
    return ConvolvedDensity(buy, sell).evaluate(t)


class ConvolvedDensity:
    """Convolution of two spectral densities, reduced to two single sums.

    The double sum
        kappa^2 sum_{i,j} mb_i kb_i ms_j ks_j (e^(kappa kb_i t) - e^(kappa ks_j t))
                          / (kappa kb_i - kappa ks_j)
    separates into row/column-weighted single sums after precomputing the
    coefficient matrix; near-degenerate pairs (|kb_i - ks_j| < 1e-10) use the
    limit t * e^(kappa k t).
    """

    def __init__(self, buy: DensitySeries, sell: DensitySeries):
        if buy.kappa != sell.kappa:
            raise DomainError("convolution requires a common mean-reversion speed")
        self.kappa = buy.kappa
        self.kb = buy.eigen.roots
        self.ks = sell.eigen.roots
        wb = buy.coeffs * self.kb
        ws = sell.coeffs * self.ks
        diff = self.kb[:, None] - self.ks[None, :]
        degenerate = np.abs(diff) < 1e-10
        safe = np.where(degenerate, 1.0, diff)
        cmat = self.kappa * np.outer(wb, ws) / safe
        cmat[degenerate] = 0.0
        self._row = cmat.sum(axis=1)  # weights of e^(kappa kb_i t)
        self._col = cmat.sum(axis=0)  # weights of e^(kappa ks_j t)
        self._deg = [
            (self.kappa**2 * wb[i] * ws[j], self.kb[i])
            for i, j in zip(*np.nonzero(degenerate))
        ]
        self.mean = buy.mean + sell.mean

    def evaluate(self, t):
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0.0):
            raise DomainError("time must be nonnegative")
        eb = np.exp(np.multiply.outer(t_arr, self.kappa * self.kb))
        es = np.exp(np.multiply.outer(t_arr, self.kappa * self.ks))
        out = eb @ self._row - es @ self._col
        for w, k in self._deg:
            out = out + w * t_arr * np.exp(self.kappa * k * t_arr)
        return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out

    def mass(self, t0: float = 0.0, t1: float = math.inf) -> float:
        """Integral of the truncated convolution density over [t0, t1]."""

        def anti(t):  # antiderivative of evaluate
            eb = np.exp(self.kappa * self.kb * t) / (self.kappa * self.kb)
            es = np.exp(self.kappa * self.ks * t) / (self.kappa * self.ks)
            val = float(eb @ self._row - es @ self._col)
            for w, k in self._deg:
                a = self.kappa * k
                val += w * math.exp(a * t) * (t / a - 1.0 / a**2)
            return val

        hi = anti(t1) if math.isfinite(t1) else 0.0
        return hi - anti(t0)
