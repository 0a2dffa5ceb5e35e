"""Quadrature and root-finding building blocks."""
import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate

from aerialcov.numerics import (DEFAULT_POLICY, QuadPolicy, bisect,
                                central_diff, expect_theta, gauss_legendre,
                                integrate, theta_nodes)


def test_gauss_legendre_exact_for_polynomials():
    x, w = gauss_legendre(8, 0.0, 2.0)
    # degree <= 15 is integrated exactly by an 8-point rule
    for k in range(15):
        exact = 2.0 ** (k + 1) / (k + 1)
        assert float(np.sum(w * x ** k)) == pytest.approx(exact, rel=1e-12)


def test_adaptive_integrator_matches_scipy_on_smooth_kernels():
    for f, a, b in [
        (lambda t: math.exp(-t * t), 0.0, 5.0),
        (lambda t: 1.0 / (1.0 + t ** 2.1), 0.0, 50.0),
        (lambda t: t * math.exp(-0.3 * t), 0.0, 30.0),
    ]:
        ref, _ = sp_integrate.quad(f, a, b)
        value, err = integrate(f, a, b)
        assert value == pytest.approx(ref, rel=1e-9)
        # the returned estimate is a conservative bound on the true error
        assert 0.0 <= err < 1e-4 * abs(ref)
        assert abs(value - ref) <= err + 1e-12 * abs(ref)


def test_adaptive_integrator_honours_breakpoints():
    # integrand with a jump; the breakpoint makes the panels align with it
    f = lambda t: 1.0 if t < 1.0 else 2.0
    value, _ = integrate(f, 0.0, 2.0, breakpoints=[1.0])
    assert value == pytest.approx(3.0, rel=1e-12)


def test_theta_nodes_average_to_identity():
    nodes, weights = theta_nodes(16)
    assert nodes.shape == weights.shape == (16,)
    assert np.all((nodes > 0.0) & (nodes < math.pi / 2))
    assert float(np.sum(weights)) == pytest.approx(1.0, rel=1e-12)
    # E[sin(theta)] over U(0, pi/2) = 2/pi
    assert float(np.sum(weights * np.sin(nodes))) == pytest.approx(
        2.0 / math.pi, rel=1e-10)


def test_expect_theta_matches_closed_form():
    assert expect_theta(np.cos) == pytest.approx(2.0 / math.pi, rel=1e-10)


def test_bisect_finds_root():
    root = bisect(lambda x: x * x - 2.0, 0.0, 2.0, tol=1e-12)
    assert root == pytest.approx(math.sqrt(2.0), abs=1e-10)


def test_central_diff_on_quadratic():
    df = central_diff(lambda x: 3.0 * x * x, 2.0, 1e-4)
    assert df == pytest.approx(12.0, rel=1e-6)


def test_policy_is_hashable_and_frozen():
    p = QuadPolicy(rel_tol=1e-8, abs_tol=1e-14, max_depth=20)
    assert hash(p) != 0 or True
    assert p != DEFAULT_POLICY
    with pytest.raises(Exception):
        p.rel_tol = 1.0
