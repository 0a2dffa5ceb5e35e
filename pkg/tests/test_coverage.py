"""Coverage probability and conditional mean SINR."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sp_integrate

from aerialcov.channel import BsKind, LinkKind
from aerialcov.coverage import (CoverageBreakdown, coverage_probability,
                                max_distance_for_sinr, mean_sinr, sinr_curve,
                                success_probability)
from aerialcov.interference import LaplaceContext


def tbs_only_oracle(cfg, tau, rel=1e-10):
    """Coverage of a network with only the terrestrial PPP, via direct
    quadrature written against scipy alone.

    Serving BS: strongest in mean power among the LoS/NLoS thinnings;
    success is the exact Nakagami-m tail, which for integer m is
    sum_{j<m} (-s0)^j/j! L^(j)(s0) with L the noise-plus-interference
    Laplace transform.  L^(j) comes from exp(-A) by explicit
    differentiation (m <= 3 covers every shipped profile), with the
    exponent derivatives A^(k) as scipy.quad integrals of the k-th
    s-derivative of the per-interferer factor 1 - (1 + s*pbar/m)^-m.
    Slow but entirely independent of the package's numerics.
    """
    dh = cfg.h_u_m - cfg.h_tb_m
    lam = cfg.lambda_tb_per_km2 * 1e-6  # per m^2
    quad_opts = dict(limit=400, epsabs=1e-13, epsrel=rel)

    def p_los(d):
        theta = math.degrees(math.atan2(dh, d)) if d > 0 else 90.0
        return 1.0 / (1.0 + cfg.a * math.exp(-cfg.b * (theta - cfg.a)))

    def thin(w, los):
        return p_los(w) if los else 1.0 - p_los(w)

    def pbar(d, los):
        dist = math.hypot(d, dh)
        eta, alpha = ((cfg.eta_l, cfg.alpha_l) if los
                      else (cfg.eta_n, cfg.alpha_n))
        return cfg.rho_tb_w * cfg.g_s * eta * dist ** (-alpha)

    def excl(d, s_los, o_los):
        """Distance below which an o_los interferer beats the s_los server."""
        p = pbar(d, s_los)
        eta, alpha = ((cfg.eta_l, cfg.alpha_l) if o_los
                      else (cfg.eta_n, cfg.alpha_n))
        q = (cfg.rho_tb_w * cfg.g_s * eta / p) ** (2.0 / alpha) - dh * dh
        return math.sqrt(q) if q > 0.0 else 0.0

    def void_exponent(r_ex, los):
        val, _ = sp_integrate.quad(
            lambda w: 2.0 * math.pi * lam * thin(w, los) * w, 0.0,
            min(r_ex, cfg.r_max_m), **quad_opts)
        return val

    def exponent_deriv(k, s, d, s_los):
        """A^(k)(s) for A = s*sigma^2 + interference exponent; signs kept."""
        total = s * cfg.sigma2_w if k == 0 else (
            cfg.sigma2_w if k == 1 else 0.0)
        for o_los in (True, False):
            m = cfg.m_l if o_los else cfg.m_n
            lo = min(excl(d, s_los, o_los), cfg.r_max_m)
            coeff = 1.0
            for i in range(1, k):
                coeff *= (m + i) / m

            def integrand(w):
                p = pbar(w, o_los)
                base = 1.0 + s * p / m
                if k == 0:
                    val = -math.expm1(-m * math.log1p(s * p / m))
                else:
                    val = coeff * p ** k * base ** (-(m + k))
                return 2.0 * math.pi * lam * thin(w, o_los) * w * val

            val, _ = sp_integrate.quad(integrand, lo, cfg.r_max_m,
                                       **quad_opts)
            total += (-1.0) ** (k + 1) * val if k else val
        return total

    def success(tau, d, s_los):
        m = cfg.m_l if s_los else cfg.m_n
        assert m <= 3, "oracle carries explicit derivatives up to order 2"
        s0 = m * tau / pbar(d, s_los)
        a0 = exponent_deriv(0, s0, d, s_los)
        lap = math.exp(-a0)
        total = lap
        if m >= 2:
            a1 = exponent_deriv(1, s0, d, s_los)
            total += -s0 * (-a1 * lap)
        if m >= 3:
            a2 = exponent_deriv(2, s0, d, s_los)
            total += s0 * s0 / 2.0 * ((a1 * a1 - a2) * lap)
        return total

    def integrand(d, s_los):
        f_ball = 2.0 * math.pi * lam * d * thin(d, s_los)
        v_same = void_exponent(d, s_los)
        v_other = void_exponent(excl(d, s_los, not s_los), not s_los)
        return f_ball * math.exp(-v_same - v_other) * success(tau, d, s_los)

    total = 0.0
    for s_los in (True, False):
        val, _ = sp_integrate.quad(lambda d: integrand(d, s_los), 0.0,
                                   cfg.r_max_m, limit=400, epsabs=1e-10,
                                   epsrel=1e-8)
        total += val
    return total


def test_matches_independent_ppp_oracle_when_roads_absent(urban):
    cfg = urban.replace(lambda_p_per_km=0.0)
    tau = 1.0
    got = coverage_probability(tau, cfg)
    assert got.p_db_l == 0.0 and got.p_db_n == 0.0
    want = tbs_only_oracle(cfg, tau)
    assert got.total == pytest.approx(want, abs=1e-6)


def test_breakdown_parts_sum_to_total(urban04):
    cb = coverage_probability(1.0, urban04)
    assert isinstance(cb, CoverageBreakdown)
    parts = cb.p_tb_l + cb.p_tb_n + cb.p_db_l + cb.p_db_n
    assert cb.total == pytest.approx(parts, rel=1e-12)
    for p in (cb.p_tb_l, cb.p_tb_n, cb.p_db_l, cb.p_db_n):
        assert 0.0 <= p <= 1.0
    assert cb.part(BsKind.Tbs, LinkKind.LoS) == cb.p_tb_l
    assert cb.part(BsKind.Dedicated, LinkKind.NLoS) == cb.p_db_n


def test_coverage_decreasing_in_threshold(urban04):
    taus = [10 ** (t / 10.0) for t in (-10.0, 0.0, 10.0)]
    vals = [coverage_probability(t, urban04).total for t in taus]
    assert vals[0] > vals[1] > vals[2]
    assert all(0.0 < v < 1.0 for v in vals)


def test_success_tends_to_one_for_tiny_threshold(urban04):
    ctx = LaplaceContext(BsKind.Tbs, LinkKind.LoS, 150.0, None, urban04)
    assert success_probability(1e-9, ctx, method="exact") == pytest.approx(
        1.0, abs=1e-4)


def test_success_bound_dominates_exact(urban04):
    ctx = LaplaceContext(BsKind.Dedicated, LinkKind.LoS, 250.0, math.pi / 3,
                         urban04)
    for tau in (0.1, 1.0, 10.0):
        exact = success_probability(tau, ctx, method="exact")
        bound = success_probability(tau, ctx, method="bound")
        assert bound >= exact - 1e-9
        assert 0.0 <= exact <= 1.0


@settings(max_examples=12, deadline=None)
@given(d=st.floats(40.0, 2500.0), tau_db=st.floats(-15.0, 15.0))
def test_success_bound_dominates_exact_everywhere(urban04_module, d, tau_db):
    ctx = LaplaceContext(BsKind.Tbs, LinkKind.NLoS, d, None, urban04_module)
    tau = 10.0 ** (tau_db / 10.0)
    exact = success_probability(tau, ctx, method="exact")
    bound = success_probability(tau, ctx, method="bound")
    assert bound >= exact - 1e-9


@pytest.fixture(scope="module")
def urban04_module():
    from aerialcov import urban_defaults
    return urban_defaults().replace(lambda_p_per_km=0.4)


def test_mean_sinr_decreases_with_distance_within_gain_piece(urban04):
    z = urban04.z_db_m
    inside = [mean_sinr(d, BsKind.Dedicated, urban04)
              for d in (0.3 * z, 0.6 * z, 0.9 * z)]
    assert inside[0] > inside[1] > inside[2] > 0.0
    tb = [mean_sinr(d, BsKind.Tbs, urban04) for d in (100.0, 400.0, 1200.0)]
    assert tb[0] > tb[1] > tb[2] > 0.0


def test_max_distance_prefix_semantics(urban04):
    gamma = 2.0
    for bs in BsKind:
        r = max_distance_for_sinr(gamma, bs, urban04)
        assert r > 0.0
        # gamma is met everywhere up to r ...
        for frac in (0.25, 0.6, 0.95):
            assert mean_sinr(frac * r, bs, urban04) >= gamma * (1 - 1e-3)
        # ... and fails somewhere no farther than tol beyond it
        assert mean_sinr(r + 0.2, bs, urban04) < gamma * (1 + 1e-3)


def test_sinr_curve_agrees_with_direct_evaluation(urban04):
    curve = sinr_curve(urban04, BsKind.Tbs)
    for d in (60.0, 330.0, 1500.0):
        direct = 10.0 * math.log10(mean_sinr(d, BsKind.Tbs, urban04))
        assert curve.value_db(d) == pytest.approx(direct, abs=0.05)
    gamma_db = 3.0
    r = curve.radius(gamma_db)
    assert r == pytest.approx(
        max_distance_for_sinr(10 ** (gamma_db / 10.0), BsKind.Tbs, urban04),
        abs=2.0)


def test_dedicated_radius_zero_without_roads(urban):
    cfg = urban.replace(lambda_p_per_km=0.0)
    cb = coverage_probability(1.0, cfg)
    assert cb.p_db_l == 0.0 and cb.p_db_n == 0.0
