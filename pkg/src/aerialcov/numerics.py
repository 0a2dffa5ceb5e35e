"""Shared numerical machinery: adaptive quadrature with breakpoint hints,
bisection, central differences, and the fixed-node expectation over the
serving-road angle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.integrate

from .errors import NumericsError


@dataclass(frozen=True)
class QuadPolicy:
    rel_tol: float = 1e-6
    abs_tol: float = 1e-12
    max_depth: int = 30
    truncation_radius: float = 30.0e3
    breakpoints: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise NumericsError("quadrature tolerances must be > 0")
        if self.truncation_radius <= 0:
            raise NumericsError("truncation radius must be > 0")


DEFAULT_POLICY = QuadPolicy()


def integrate(f, a, b, policy: QuadPolicy = DEFAULT_POLICY, breakpoints=None):
    """Adaptive quadrature of f on [a, b] -> (value, error estimate).

    Semi-infinite upper limits are mapped to the policy truncation radius;
    declared breakpoints (plus the policy's) force subdivision boundaries.
    """
    if math.isinf(b):
        b = policy.truncation_radius
    if math.isinf(a):
        raise NumericsError("lower integration limit must be finite")
    if b <= a:
        return 0.0, 0.0
    pts = list(policy.breakpoints) + list(breakpoints or ())
    pts = sorted(p for p in pts if a < p < b)
    limit = 50 + 10 * policy.max_depth
    try:
        val, err = scipy.integrate.quad(
            f, a, b,
            points=pts or None,
            limit=limit,
            epsabs=policy.abs_tol,
            epsrel=policy.rel_tol,
        )
    except Exception as e:
        raise NumericsError(f"quadrature failed on [{a}, {b}]: {e}") from e
    if not math.isfinite(val):
        raise NumericsError(f"quadrature diverged on [{a}, {b}]")
    return val, err


def bisect(f, lo, hi, tol=1e-10, max_iter=200):
    """Root of a monotone f on [lo, hi] by bisection."""
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NumericsError(f"bisect: no sign change on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or (hi - lo) < tol:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def central_diff(f, x, h):
    return (f(x + h) - f(x - h)) / (2.0 * h)


@lru_cache(maxsize=32)
def gauss_legendre(n, a=0.0, b=1.0):
    """Gauss-Legendre nodes/weights mapped onto [a, b]."""
    x, w = np.polynomial.legendre.leggauss(n)
    nodes = 0.5 * (b - a) * (x + 1.0) + a
    weights = 0.5 * (b - a) * w
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def theta_nodes(n=16):
    """Quadrature nodes/weights for averaging over theta ~ U(0, pi/2);
    weights sum to 1."""
    nodes, weights = gauss_legendre(n, 0.0, math.pi / 2.0)
    return nodes, weights / (math.pi / 2.0)


def expect_theta(g, nodes=16):
    """Average of g(theta) over theta uniform on (0, pi/2)."""
    th, w = theta_nodes(nodes)
    return float(sum(wi * g(ti) for ti, wi in zip(th, w)))
