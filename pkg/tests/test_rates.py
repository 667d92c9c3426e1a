"""Rate-model tests: parameter transforms, fundamental solutions, transform g."""

import math

import numpy as np
import pytest

from cirstop import (
    CirParams,
    DiscountMode,
    DiscountSpec,
    derive_transform,
    fundamental_pair,
    invert_g,
    transform_g,
)
from cirstop.chf import SeriesControl
from cirstop.errors import ConfigError, DomainError

R_GRID = np.geomspace(1e-4, 1.0, 120)


class TestCirParams:
    def test_feller_violation_rejected(self):
        with pytest.raises(ConfigError, match="Feller"):
            CirParams(kappa=0.1, theta=0.01, sigma=0.2)

    @pytest.mark.parametrize("bad", [dict(kappa=-1.0), dict(theta=0.0), dict(sigma=-0.1)])
    def test_positivity(self, bad):
        base = dict(kappa=0.9, theta=0.08 / 0.9, sigma=math.sqrt(0.033))
        with pytest.raises(ConfigError):
            CirParams(**{**base, **bad})


class TestDeriveTransform:
    def test_baseline_values(self, cir, disc):
        # oracle: direct arithmetic on the parameter formulas
        p = derive_transform(cir, disc)
        assert p.beta == pytest.approx(4.84848484848485, rel=1e-12)
        assert p.xi == pytest.approx(0.9073036977771, rel=1e-12)
        assert p.zeta == pytest.approx(54.9881028955818, rel=1e-12)
        assert p.nu == pytest.approx(0.221324175063649, rel=1e-12)
        assert p.alpha == pytest.approx(0.0195148923656672, rel=1e-12)
        assert p.omega == pytest.approx(54.5454545454545, rel=1e-12)
        assert p.nu == pytest.approx(p.alpha * p.zeta / p.beta, rel=1e-12)

    def test_chi_equal_gamma_rejected(self):
        with pytest.raises(ConfigError, match="chi > gamma"):
            DiscountSpec(mode=DiscountMode.STOCHASTIC, chi=0.4, gamma_wage=0.4)

    def test_gamma_to_zero_specialization(self, cir):
        # the wage-growth-free xi limit: sqrt(kappa^2 + 2 sigma^2 chi)
        disc = DiscountSpec(mode=DiscountMode.STOCHASTIC, chi=0.6, gamma_wage=1e-12)
        p = derive_transform(cir, disc)
        assert p.xi == pytest.approx(0.921737489744233, rel=1e-9)

    def test_constant_mode_requires_real_xi(self, cir):
        disc = DiscountSpec(mode=DiscountMode.CONSTANT, chi=0.6, gamma_wage=0.4)
        big_gamma = DiscountSpec(mode=DiscountMode.CONSTANT, chi=0.6, gamma_wage=20.0)
        derive_transform(cir, disc)
        with pytest.raises(ConfigError, match="kappa\\^2 > 2\\*gamma\\*sigma\\^2"):
            derive_transform(cir, big_gamma)

    def test_constant_mode_chi_threshold_named(self, cir):
        disc = DiscountSpec(mode=DiscountMode.CONSTANT, chi=0.02, gamma_wage=0.4)
        with pytest.raises(ConfigError, match="0.03585"):
            derive_transform(cir, disc)


class TestFundamentalPair:
    def test_monotone(self, pair):
        up = np.array([pair.u_plus(r) for r in R_GRID])
        um = np.array([pair.u_minus(r) for r in R_GRID])
        assert np.all(np.diff(up) > 0)
        assert np.all(np.diff(um) < 0)
        assert np.all(up > 0) and np.all(um > 0)

    def test_derivative_signs(self, pair):
        for r in R_GRID:
            assert pair.u_plus_prime(r) > 0
            assert pair.u_minus_prime(r) < 0

    def test_derivatives_match_finite_differences(self, pair):
        h = 1e-7
        for r in (0.02, 0.08, 0.3, 0.9):
            fd_p = (pair.u_plus(r + h) - pair.u_plus(r - h)) / (2 * h)
            fd_m = (pair.u_minus(r + h) - pair.u_minus(r - h)) / (2 * h)
            assert pair.u_plus_prime(r) == pytest.approx(fd_p, rel=1e-6)
            assert pair.u_minus_prime(r) == pytest.approx(fd_m, rel=1e-6)

    def test_boundary_trends(self, cir, disc, pair):
        # u- blows up at 0+ and vanishes at infinity; u+ grows without bound.
        # At the left boundary u+ tends to M(alpha,beta,0) = 1 exactly (the
        # n=0 series term), not to 0.
        far = fundamental_pair(cir, disc, SeriesControl(max_terms=3000))
        assert pair.u_minus(1e-6) > 1e3 * pair.u_minus(1e-2)
        assert far.u_minus(100.0) < 1e-3 * far.u_minus(0.1)
        assert far.u_plus(10.0) > 1e6 * far.u_plus(1.0)
        assert pair.u_plus(1e-6) == pytest.approx(1.0, abs=1e-6)
        assert pair.u_plus(1e-6) < pair.u_plus(1e-3) < pair.u_plus(1e-1)

    def test_ode_residual(self, pair, cir, disc):
        # (A - lam(r)) u = 0; u'' differences the analytic first derivative
        def resid(u, up_, r):
            h = 1e-5 * max(r, 0.05)
            upp = (up_(r + h) - up_(r - h)) / (2.0 * h)
            terms = (
                cir.drift(r) * up_(r),
                0.5 * cir.sigma2 * r * upp,
                -disc.rate(r) * u(r),
            )
            return sum(terms), max(abs(t) for t in terms)

        for r in (0.05, 0.08, 0.2):
            for u, up_ in ((pair.u_plus, pair.u_plus_prime), (pair.u_minus, pair.u_minus_prime)):
                res, scale = resid(u, up_, r)
                assert abs(res) <= 1e-6 * max(1.0, scale), r

    def test_wronskian_positive(self, pair):
        for r in R_GRID[::6]:
            w = pair.u_plus_prime(r) * pair.u_minus(r) - pair.u_plus(r) * pair.u_minus_prime(r)
            assert w > 0

    def test_rejects_nonpositive_rate(self, pair):
        with pytest.raises(DomainError):
            pair.u_plus(0.0)


class TestTransformG:
    def test_negative_and_increasing(self, pair):
        g = [transform_g(pair, r) for r in R_GRID]
        assert all(v < 0 for v in g)
        assert all(a < b for a, b in zip(g, g[1:]))

    def test_stable_under_series_refinement(self, cir, disc):
        coarse = fundamental_pair(cir, disc, SeriesControl())
        fine = fundamental_pair(cir, disc, SeriesControl(max_terms=1000, quad_nodes=192))
        v1 = transform_g(coarse, 0.08)
        v2 = transform_g(fine, 0.08)
        assert v1 == pytest.approx(v2, rel=1e-9)

    def test_invert_round_trips(self, pair):
        for r in (0.02, 0.08, 0.167, 0.3):
            q = transform_g(pair, r)
            assert invert_g(pair, q) == pytest.approx(r, rel=1e-9)

    def test_invert_residual(self, pair):
        for q in (-2.0, -0.5, -1e-3):
            r = invert_g(pair, q)
            assert abs(transform_g(pair, r) - q) <= 1e-12 * abs(q)

    def test_invert_monotone_tail(self, pair):
        assert invert_g(pair, -1e-8) > invert_g(pair, -1e-2)

    def test_invert_rejects_nonnegative(self, pair):
        with pytest.raises(DomainError):
            invert_g(pair, 0.0)


class TestConstantMode:
    def test_monotone_suite(self, cir, disc_const):
        pair = fundamental_pair(cir, disc_const)
        up = np.array([pair.u_plus(r) for r in R_GRID])
        um = np.array([pair.u_minus(r) for r in R_GRID])
        assert np.all(np.diff(up) > 0)
        assert np.all(np.diff(um) < 0)
        assert np.all(up > 0) and np.all(um > 0)

    def test_ode_residual(self, cir, disc_const):
        pair = fundamental_pair(cir, disc_const)

        def resid(u, up_, r):
            h = 1e-5 * max(r, 0.05)
            upp = (up_(r + h) - up_(r - h)) / (2.0 * h)
            terms = (
                cir.drift(r) * up_(r),
                0.5 * cir.sigma2 * r * upp,
                -disc_const.rate(r) * u(r),
            )
            return sum(terms), max(abs(t) for t in terms)

        for r in (0.05, 0.08, 0.2):
            res, scale = resid(pair.u_plus, pair.u_plus_prime, r)
            assert abs(res) <= 1e-6 * max(1.0, scale)
            res, scale = resid(pair.u_minus, pair.u_minus_prime, r)
            assert abs(res) <= 1e-6 * max(1.0, scale)

    def test_g_monotone(self, cir, disc_const):
        pair = fundamental_pair(cir, disc_const)
        g = [transform_g(pair, r) for r in R_GRID[::4]]
        assert all(v < 0 for v in g)
        assert all(a < b for a, b in zip(g, g[1:]))
