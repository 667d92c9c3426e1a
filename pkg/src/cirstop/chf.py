"""Confluent hypergeometric kernel: Euler gamma, Kummer M, Tricomi U and derivatives.

M(a,b,z) is evaluated by its ascending series.  U(a,b,z) is evaluated by
generalized Gauss-Laguerre quadrature of its integral representation when
a > 0 and the argument is not small, and otherwise through the M-combination

    U = Gamma(1-b)/Gamma(a+1-b) * M(a,b,z)
        + Gamma(b-1)/Gamma(a) * z^(1-b) * M(a+1-b,2-b,z).

Both routes suffer catastrophic cancellation when the first parameter is
very negative (series terms peak near exp(2*sqrt(|a|*z)) while the sum
stays algebraic).  Evaluations whose estimated digit loss exceeds what a
double can absorb are transparently redone with the same algorithms in
mpmath arbitrary-precision arithmetic and rounded back to float.
"""

from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp
from scipy.special import roots_genlaguerre

from .errors import ConvergenceError, DomainError, OverflowSignal, PoleError

__all__ = [
    "SeriesControl",
    "gamma",
    "kummer_m",
    "tricomi_u",
    "chf_deriv_z",
    "chf_deriv_a",
]

# mpmath precision is a process-global; serialize escalated evaluations.
_MP_LOCK = threading.Lock()

# digits of cancellation a double absorbs before we escalate to mpmath
_ESCALATE_DIGITS = 5.0
_LOG10_E = math.log10(math.e)

# below this argument the U integral representation converges too slowly
# (integrand singularity at t = -z approaches the domain); use the
# M-combination, which is cancellation-free for small z.
_U_INTEGRAL_Z_MIN = 1.0


@dataclass(frozen=True)
class SeriesControl:
    """Truncation and quadrature controls for the special-function kernel."""

    max_terms: int = 500
    rel_tol: float = 1e-15
    quad_nodes: int = 96

    def __post_init__(self):
        if self.max_terms < 1:
            raise DomainError("max_terms must be >= 1")
        if not (0.0 < self.rel_tol < 1.0):
            raise DomainError("rel_tol must lie in (0, 1)")
        if self.quad_nodes < 8:
            raise DomainError("quad_nodes must be >= 8")


DEFAULT_CONTROL = SeriesControl()


def gamma(x: float) -> float:
    """Euler gamma function on the real line, poles excluded."""
    if x <= 0.0 and x == math.floor(x):
        raise PoleError(f"gamma pole at non-positive integer x={x}")
    try:
        return math.gamma(x)
    except OverflowError as exc:
        raise OverflowSignal(f"gamma({x}) exceeds double range") from exc
    except ValueError as exc:  # pragma: no cover - guarded above
        raise PoleError(f"gamma undefined at x={x}") from exc


def _is_nonpositive_integer(b: float) -> bool:
    return b <= 0.0 and b == math.floor(b)


def _cancellation_digits(a: float, z: float) -> float:
    """Predicted decimal digits lost to cancellation in the M series."""
    if a >= 0.0 or z <= 0.0:
        return 0.0
    return 2.0 * math.sqrt(-a * z) * _LOG10_E


def _kummer_m_float(a: float, b: float, z: float, ctl: SeriesControl):
    """Ascending series in double precision.

    Terms must fall below the requested relative tolerance AND below the
    roundoff floor of the largest term: with heavy sign cancellation the
    small late terms still carry the entire result, so they cannot be cut
    at a fraction of the (tiny) running sum alone.

    Returns (sum, max_abs_term).  Raises ConvergenceError if max_terms is
    reached first, OverflowSignal if partial sums leave the double range.
    """
    total = 1.0
    term = 1.0
    max_abs = 1.0
    below = 0
    for n in range(ctl.max_terms):
        term *= (a + n) * z / ((b + n) * (n + 1))
        total += term
        if not math.isfinite(total):
            raise OverflowSignal(f"M({a},{b},{z}) overflows double range")
        at = abs(term)
        if at > max_abs:
            max_abs = at
        if term == 0.0:  # negative-integer a truncates the series
            return total, max_abs
        if at <= ctl.rel_tol * abs(total) and at <= 1e-14 * max_abs:
            below += 1
            if below >= 3:
                return total, max_abs
        else:
            below = 0
    raise ConvergenceError(
        f"M series not converged after {ctl.max_terms} terms (a={a}, b={b}, z={z})"
    )


def _kummer_m_mp(a: float, b: float, z: float, ctl: SeriesControl, dps: int):
    """Same ascending series in mpmath arithmetic at the given precision."""
    with _MP_LOCK, mp.workdps(dps):
        return _kummer_m_mp_unlocked(a, b, z, ctl)


def _mp_terms_budget(a: float, z: float, ctl: SeriesControl) -> SeriesControl:
    """Enlarge max_terms for deep negative-a evaluations (term peak ~ sqrt(|a|z))."""
    if a >= 0.0:
        return ctl
    need = int(8.0 * math.sqrt(-a * max(z, 1.0))) + 200
    if need <= ctl.max_terms:
        return ctl
    return SeriesControl(max_terms=need, rel_tol=ctl.rel_tol, quad_nodes=ctl.quad_nodes)


def kummer_m(a: float, b: float, z: float, ctl: SeriesControl | None = None) -> float:
    """Confluent hypergeometric function of the first kind M(a,b,z), z >= 0."""
    ctl = ctl or DEFAULT_CONTROL
    if _is_nonpositive_integer(b):
        raise PoleError(f"M(a,b,z) parameter pole: b={b} is a non-positive integer")
    if z < 0.0:
        raise DomainError(f"M(a,b,z) requires z >= 0, got z={z}")
    if z == 0.0:
        return 1.0

    loss = _cancellation_digits(a, z)
    if loss <= _ESCALATE_DIGITS:
        total, max_abs = _kummer_m_float(a, b, z, ctl)
        # a-posteriori cancellation check; retry in mp if the double sum
        # retained too few digits
        if max_abs == 0.0 or abs(total) >= 1e-7 * max_abs:
            return total
        loss = math.log10(max_abs / max(abs(total), 1e-300))

    dps = int(25 + loss)
    ctl_mp = _mp_terms_budget(a, z, ctl)
    for _ in range(3):
        total, max_abs = _kummer_m_mp(a, b, z, ctl_mp, dps)
        if total == 0 or max_abs == 0:
            return 0.0
        actual_loss = float(mp.log10(max_abs / abs(total)))
        if dps - actual_loss >= 15:
            return float(total)
        dps = int(actual_loss + 25)
    raise ConvergenceError(f"M({a},{b},{z}) cancellation exceeds precision budget")


# scipy's Golub-Welsch Laguerre rule loses positivity/finiteness past ~350 nodes
_MAX_QUAD_NODES = 320


@lru_cache(maxsize=64)
def _genlaguerre_rule(n: int, alpha: float):
    s, w = roots_genlaguerre(n, alpha)
    if not (math.isfinite(s[-1]) and math.isfinite(w[-1])):
        raise ConvergenceError(f"Gauss-Laguerre rule unstable at {n} nodes")
    return s, w


def _tricomi_u_integral(a: float, b: float, z: float, ctl: SeriesControl) -> float:
    """U(a,b,z) for a > 0 via generalized Gauss-Laguerre quadrature.

    After s = z*t the representation becomes
        U = z^(-a)/Gamma(a) * int_0^inf e^(-s) s^(a-1) (1+s/z)^(b-a-1) ds,
    so nodes with weight s^(a-1) e^(-s) absorb the endpoint singularity.
    """
    def estimate(n_nodes: int) -> float:
        s, w = _genlaguerre_rule(min(n_nodes, _MAX_QUAD_NODES), a - 1.0)
        g = (1.0 + s / z) ** (b - a - 1.0)
        return float((w * g).sum()) * z ** (-a) / gamma(a)

    first = estimate(ctl.quad_nodes)
    second = estimate(2 * ctl.quad_nodes)
    if abs(second - first) > 1e-10 * max(1.0, abs(second)):
        third = estimate(4 * ctl.quad_nodes)
        if abs(third - second) > 1e-10 * max(1.0, abs(third)):
            raise ConvergenceError(
                f"U integral quadrature not converged (a={a}, b={b}, z={z})"
            )
        return third
    return second


def _tricomi_u_gamma_relation(a: float, b: float, z: float, ctl: SeriesControl) -> float:
    """U(a,b,z) via the M-combination, escalating to mpmath on cancellation."""
    inner_loss = max(_cancellation_digits(a, z), _cancellation_digits(a + 1.0 - b, z))
    loss = inner_loss + _u_outer_loss(a, b, z)

    if loss <= _ESCALATE_DIGITS and z < 100.0:
        b = _nudge_integer_b(b)
        try:
            t1 = gamma(1.0 - b) / gamma(a + 1.0 - b) * kummer_m(a, b, z, ctl)
        except PoleError:
            t1 = 0.0  # 1/Gamma vanishes at the pole
        try:
            t2 = gamma(b - 1.0) / gamma(a) * z ** (1.0 - b) * kummer_m(
                a + 1.0 - b, 2.0 - b, z, ctl
            )
        except PoleError:
            t2 = 0.0
        u = t1 + t2
        if abs(u) >= 1e-7 * max(abs(t1), abs(t2), 1e-300):
            return u

    out = float(_tricomi_u_mpf(a, b, z, ctl))
    if math.isinf(out):
        raise OverflowSignal(f"U({a},{b},{z}) exceeds double range")
    return out


def _nudge_integer_b(b: float) -> float:
    if abs(b - round(b)) < 1e-6:
        warnings.warn(
            f"U(a,b,z): b={b} within 1e-6 of an integer; perturbing b by 1e-6",
            stacklevel=4,
        )
        return b + 1e-6
    return b


def _u_outer_loss(a: float, b: float, z: float) -> float:
    # both Gamma-relation terms blow up factorially at large negative first
    # parameter; near roots of U they cancel almost completely
    if a >= 0.5:
        return 0.0
    return max(
        _log10_abs_rgamma(a), _log10_abs_rgamma(a + 1.0 - b), 0.0
    ) + 0.5 * z * _LOG10_E


def _tricomi_u_mpf(a: float, b: float, z: float, ctl: SeriesControl):
    """U(a,b,z) through the M-combination as an mpf at adequate precision.

    The value itself can exceed the double range at very negative `a`
    (its amplitude grows factorially); callers that need ratios of such
    values divide in mp before rounding.
    """
    b = _nudge_integer_b(b)
    inner_loss = max(_cancellation_digits(a, z), _cancellation_digits(a + 1.0 - b, z))
    dps = int(30 + inner_loss + _u_outer_loss(a, b, z))
    ctl_mp = _mp_terms_budget(min(a, a + 1.0 - b), z, ctl)
    for _ in range(3):
        with _MP_LOCK, mp.workdps(dps):
            bm = mp.mpf(b)
            m1, _ = _kummer_m_mp_unlocked(a, b, z, ctl_mp)
            m2, _ = _kummer_m_mp_unlocked(a + 1.0 - b, 2.0 - b, z, ctl_mp)
            t1 = mp.gamma(1 - bm) * mp.rgamma(a + 1 - bm) * m1
            t2 = mp.gamma(bm - 1) * mp.rgamma(a) * mp.mpf(z) ** (1 - bm) * m2
            u = t1 + t2
            big = max(abs(t1), abs(t2))
            ok = u == 0 or big == 0 or dps - float(mp.log10(big / abs(u))) >= 15
        if ok:
            return u
        dps = int(dps * 1.6 + 20)
    raise ConvergenceError(f"U({a},{b},{z}) cancellation exceeds precision budget")


def _kummer_m_mp_unlocked(a: float, b: float, z: float, ctl: SeriesControl):
    """M series under an already-held mp context (no locking, no dps change).

    Terms run down to the roundoff floor of the peak term (see
    _kummer_m_float for why the running sum alone cannot set the cutoff).
    """
    am, bm, zm = mp.mpf(a), mp.mpf(b), mp.mpf(z)
    floor_factor = mp.mpf(10) ** (-(mp.mp.dps - 2))
    total = mp.mpf(1)
    term = mp.mpf(1)
    max_abs = mp.mpf(1)
    below = 0
    for n in range(ctl.max_terms):
        term *= (am + n) * zm / ((bm + n) * (n + 1))
        total += term
        at = abs(term)
        if at > max_abs:
            max_abs = at
        if term == 0:
            return total, max_abs
        if at <= ctl.rel_tol * abs(total) and at <= floor_factor * max_abs:
            below += 1
            if below >= 3:
                return total, max_abs
        else:
            below = 0
    raise ConvergenceError(
        f"M series (mp) not converged after {ctl.max_terms} terms (a={a}, b={b}, z={z})"
    )


def _log10_abs_rgamma(x: float) -> float:
    """log10 |1/Gamma(x)|, finite everywhere (0 at the poles of Gamma)."""
    if x > 0.0:
        return -math.lgamma(x) * _LOG10_E
    if x == math.floor(x):
        return -math.inf
    # reflection: |Gamma(x)| = pi / (|sin(pi x)| * Gamma(1-x))
    return (
        math.lgamma(1.0 - x) + math.log(abs(math.sin(math.pi * x))) - math.log(math.pi)
    ) * _LOG10_E


def tricomi_u(a: float, b: float, z: float, ctl: SeriesControl | None = None) -> float:
    """Confluent hypergeometric function of the second kind U(a,b,z), z > 0."""
    ctl = ctl or DEFAULT_CONTROL
    if z <= 0.0:
        raise DomainError(f"U(a,b,z) requires z > 0, got z={z}")
    if a > 0.0 and z >= _U_INTEGRAL_Z_MIN:
        return _tricomi_u_integral(a, b, z, ctl)
    return _tricomi_u_gamma_relation(a, b, z, ctl)


def chf_deriv_z(
    kind: str, a: float, b: float, z: float, ctl: SeriesControl | None = None
) -> float:
    """d/dz of M or U at unit argument scale.

    dM/dz = (a/b) M(a+1,b+1,z); dU/dz = -a U(a+1,b+1,z).
    """
    ctl = ctl or DEFAULT_CONTROL
    if kind == "M":
        return (a / b) * kummer_m(a + 1.0, b + 1.0, z, ctl)
    if kind == "U":
        return -a * tricomi_u(a + 1.0, b + 1.0, z, ctl)
    raise DomainError(f"kind must be 'M' or 'U', got {kind!r}")


def chf_deriv_a(
    kind: str,
    a: float,
    b: float,
    z: float,
    step: float | None = None,
    ctl: SeriesControl | None = None,
) -> float:
    """Central finite difference of M or U in the first parameter.

    Default step is 1e-6 * max(1, |a|).  A Richardson step-halving estimate
    is used to flag excessive cancellation.
    """
    ctl = ctl or DEFAULT_CONTROL
    if kind == "M":
        f = lambda x: kummer_m(x, b, z, ctl)
    elif kind == "U":
        f = lambda x: tricomi_u(x, b, z, ctl)
    else:
        raise DomainError(f"kind must be 'M' or 'U', got {kind!r}")
    h = step if step is not None else 1e-6 * max(1.0, abs(a))
    d1 = (f(a + h) - f(a - h)) / (2.0 * h)
    d2 = (f(a + 0.5 * h) - f(a - 0.5 * h)) / h
    if d1 != 0.0 or d2 != 0.0:
        richardson = (4.0 * d2 - d1) / 3.0
        scale = max(abs(richardson), 1e-300)
        if abs(d2 - d1) > 1e-4 * scale:
            warnings.warn(
                f"chf_deriv_a({kind}, a={a}): step {h:g} may be too small; "
                f"step-halving discrepancy {abs(d2 - d1) / scale:.2e}",
                stacklevel=2,
            )
    return d1
