"""Special-function kernel tests against independent references.

mpmath's own hypergeometric implementations serve as the cross-check for
the ascending-series/quadrature evaluators here; the two codebases share
no evaluation path.
"""

import math

import mpmath
import numpy as np
import pytest
from scipy.integrate import quad

from cirstop.chf import (
    SeriesControl,
    _tricomi_u_gamma_relation,
    _tricomi_u_integral,
    chf_deriv_a,
    chf_deriv_z,
    gamma,
    kummer_m,
    tricomi_u,
)
from cirstop.errors import ConvergenceError, DomainError, PoleError

CTL = SeriesControl()
BETA = 160.0 / 33.0  # 4.8484..., the baseline CHF second parameter


class TestGamma:
    def test_classical_values(self):
        assert gamma(1.0) == pytest.approx(1.0, rel=1e-14)
        assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
        assert gamma(5.0) == pytest.approx(24.0, rel=1e-14)

    def test_twelve_digits_over_range(self):
        xs = np.concatenate([np.linspace(-49.5, -0.3, 60), np.linspace(0.05, 50.0, 60)])
        for x in xs:
            if x <= 0 and abs(x - round(x)) < 1e-3:
                continue
            ref = float(mpmath.gamma(x))
            assert gamma(float(x)) == pytest.approx(ref, rel=1e-12)

    @pytest.mark.parametrize("x", [0.0, -1.0, -7.0])
    def test_pole(self, x):
        with pytest.raises(PoleError):
            gamma(x)

    def test_overflow_signal(self):
        from cirstop.errors import OverflowSignal

        with pytest.raises(OverflowSignal):
            gamma(2000.0)


class TestKummerM:
    def test_at_zero_is_one(self):
        assert kummer_m(2.3, 4.8, 0.0) == 1.0

    def test_exponential_case(self):
        assert kummer_m(1.0, 1.0, 1.0) == pytest.approx(math.e, rel=1e-13)

    def test_degree_one_polynomial(self):
        # a = -1 truncates the series to 1 - z/b
        assert kummer_m(-1.0, BETA, 2.0) == pytest.approx(0.5875, rel=1e-13)

    def test_parameter_pole(self):
        with pytest.raises(PoleError):
            kummer_m(1.0, -3.0, 1.0)

    def test_negative_argument_rejected(self):
        with pytest.raises(DomainError):
            kummer_m(1.0, 2.0, -0.5)

    def test_max_terms_exhaustion(self):
        with pytest.raises(ConvergenceError):
            kummer_m(1.0, 2.0, 40.0, SeriesControl(max_terms=10))

    def test_against_mpmath_grid(self):
        for a in (-7.3, -0.8, 0.02, 1.0, 4.5):
            for z in (0.01, 1.0, 9.1, 25.0, 55.0):
                ref = float(mpmath.hyp1f1(a, BETA, z))
                assert kummer_m(a, BETA, z) == pytest.approx(ref, rel=1e-11), (a, z)

    def test_deep_negative_parameter(self):
        # cancellation beyond double range has to escalate internally
        ctl = SeriesControl(max_terms=20_000)
        for a in (-150.0, -700.0, -2790.0):
            with mpmath.workdps(int(60 + 2 * math.sqrt(-a * 9.11) / math.log(10))):
                ref = float(mpmath.hyp1f1(a, BETA, 9.11))
            assert kummer_m(a, BETA, 9.11, ctl) == pytest.approx(ref, rel=1e-11), a


class TestTricomiU:
    def test_exponential_integral_case(self):
        # independent oracle: direct quadrature of int_0^inf e^(-t)/(1+t) dt
        oracle, err = quad(lambda t: math.exp(-t) / (1.0 + t), 0.0, np.inf)
        assert err < 1e-8
        assert tricomi_u(1.0, 1.0, 1.0) == pytest.approx(oracle, rel=1e-8)
        assert tricomi_u(1.0, 1.0, 1.0) == pytest.approx(0.59634736232319407, rel=1e-10)

    def test_integral_and_gamma_relation_agree(self):
        for a in (0.25, 0.5, 1.5, 3.0, 5.0):
            for z in (1.0, 3.0, 9.0):
                via_int = _tricomi_u_integral(a, 4.8485, z, CTL)
                via_rel = _tricomi_u_gamma_relation(a, 4.8485, z, CTL)
                assert via_int == pytest.approx(via_rel, rel=1e-9), (a, z)

    def test_quadrature_path_value(self):
        assert tricomi_u(0.5, 4.8485, 3.0) == pytest.approx(1.1658125622314811, rel=1e-10)

    def test_decreasing_in_argument(self):
        zs = np.linspace(0.5, 30.0, 40)
        vals = [tricomi_u(1.2, BETA, float(z)) for z in zs]
        assert all(v1 > v2 for v1, v2 in zip(vals, vals[1:]))

    def test_positive(self):
        for a in (0.02, 0.5, 2.0):
            for z in (1e-3, 0.5, 5.0, 50.0):
                assert tricomi_u(a, BETA, z) > 0.0

    def test_domain_error(self):
        with pytest.raises(DomainError):
            tricomi_u(1.0, 2.0, 0.0)

    def test_near_integer_b_perturbed_with_warning(self):
        with pytest.warns(UserWarning, match="perturbing"):
            tricomi_u(-0.5, 3.0 + 1e-9, 2.0)

    def test_against_mpmath_grid(self):
        for a in (-25.7, -6.3, -0.5, 0.02, 1.05):
            for z in (0.05, 1.42, 4.36, 9.11):
                ref = float(mpmath.hyperu(a, BETA, z))
                assert tricomi_u(a, BETA, z) == pytest.approx(ref, rel=1e-9), (a, z)


class TestDerivatives:
    def test_deriv_z_at_zero(self):
        a, b = 0.7, 3.3
        assert chf_deriv_z("M", a, b, 0.0) == pytest.approx(a / b, rel=1e-13)

    def test_deriv_z_exponential(self):
        assert chf_deriv_z("M", 1.0, 1.0, 1.0) == pytest.approx(math.e, rel=1e-12)

    def test_deriv_z_u_case(self):
        assert chf_deriv_z("U", 1.0, 1.0, 1.0) == pytest.approx(
            -0.40365263767680593, rel=1e-9
        )

    def test_deriv_z_matches_finite_difference(self):
        h = 1e-6
        for a in (0.3, 2.0, 7.5):
            for b in (1.3, 4.85, 9.0):
                for z in (0.2, 3.0, 12.0, 20.0):
                    fd = (kummer_m(a, b, z + h) - kummer_m(a, b, z - h)) / (2 * h)
                    an = chf_deriv_z("M", a, b, z)
                    assert abs(an - fd) <= 1e-6 * (1.0 + abs(an)), (a, b, z)
        for a in (0.3, 2.0):
            for z in (0.5, 3.0, 12.0):
                fd = (tricomi_u(a, BETA, z + h) - tricomi_u(a, BETA, z - h)) / (2 * h)
                an = chf_deriv_z("U", a, BETA, z)
                assert abs(an - fd) <= 1e-6 * (1.0 + abs(an)), (a, z)

    def test_deriv_a_constant_in_a_at_zero(self):
        assert chf_deriv_a("M", 1.7, 3.1, 0.0) == 0.0

    def test_deriv_a_against_series(self):
        # oracle: differentiate the truncated ascending series termwise in a
        a, b, z = 1.0, 2.0, 1.0
        terms_d = []
        coef = 1.0
        dcoef = 0.0
        for n in range(40):
            dcoef = dcoef * (a + n) / ((b + n) * (n + 1)) + coef / ((b + n) * (n + 1))
            coef *= (a + n) / ((b + n) * (n + 1))
            terms_d.append(dcoef * z ** (n + 1))
        oracle = sum(terms_d)
        assert chf_deriv_a("M", a, b, z) == pytest.approx(oracle, rel=1e-8)

    def test_deriv_a_richardson_consistency(self):
        vals = [
            chf_deriv_a("U", -0.5, 4.8485, 9.1, step=s) for s in (1e-5, 1e-6, 1e-7)
        ]
        for v in vals[1:]:
            assert v == pytest.approx(vals[0], rel=1e-5)

    def test_bad_kind(self):
        with pytest.raises(DomainError):
            chf_deriv_z("Q", 1.0, 1.0, 1.0)


def _fd2(f, z: float, h: float) -> float:
    return (f(z + h) - 2.0 * f(z) + f(z - h)) / h**2


def _kummer_residual(kind: str, a: float, b: float, z: float) -> float:
    """z F'' + (b - z) F' - a F, derivatives by step-halved finite differences."""
    f = (lambda x: kummer_m(a, b, x)) if kind == "M" else (lambda x: tricomi_u(a, b, x))
    h = 1e-4 * max(z, 1.0)
    fpp = (4.0 * _fd2(f, z, 0.5 * h) - _fd2(f, z, h)) / 3.0
    fp = (f(z - h) - 8 * f(z - 0.5 * h) + 8 * f(z + 0.5 * h) - f(z + h)) / (6.0 * h)
    return z * fpp + (b - z) * fp - a * f(z)


class TestKummerEquation:
    def test_m_satisfies_equation(self):
        for a in (0.02, 0.7, 3.0):
            for b in (1.3, BETA):
                for z in (0.5, 4.0, 12.0):
                    res = _kummer_residual("M", a, b, z)
                    assert abs(res) <= 1e-6 * max(1.0, abs(kummer_m(a, b, z))), (a, b, z)

    def test_u_satisfies_equation(self):
        for a in (0.02, 0.7, 3.0):
            for z in (0.5, 4.0, 12.0):
                res = _kummer_residual("U", a, BETA, z)
                assert abs(res) <= 1e-6 * max(1.0, abs(tricomi_u(a, BETA, z))), (a, z)


class TestSeriesControl:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"max_terms": 0},
            {"rel_tol": 0.0},
            {"rel_tol": 1.5},
            {"quad_nodes": 4},
        ],
    )
    def test_invariants(self, kwargs):
        with pytest.raises(DomainError):
            SeriesControl(**kwargs)
