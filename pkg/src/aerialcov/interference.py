"""Laplace transforms of the aggregate interference seen by the aerial user,
conditioned on the serving BS kind, link state, distance, and (for dedicated
serving BSs) the serving road's orientation.

The transforms factor into a general-field part (all terrestrial BSs plus all
roads other than the serving one) and a serving-road part.  Interferer fields
are thinned by the per-kind exclusion radii implied by maximum-mean-power
association.

Accuracy note: dedicated-interferer integrands are tabulated on ~500-knot log
grids and integrated in closed form, which bounds the exponent's relative
error near 1e-4 regardless of the requested tolerance; the adaptive outer
quadratures honor the policy within that floor.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .channel import BsKind, LinkKind
from .config import NetworkConfig
from .errors import NumericsError
from .numerics import DEFAULT_POLICY, QuadPolicy


@dataclass(frozen=True)
class LaplaceContext:
    """Serving-link conditioning for the interference transforms."""

    bs: BsKind
    link: LinkKind
    distance: float
    theta_d: float | None
    params: NetworkConfig

    def __post_init__(self):
        if self.distance < 0.0:
            raise ValueError("serving distance must be non-negative")
        if self.bs is BsKind.Dedicated and self.theta_d is None:
            raise ValueError("dedicated serving BS requires theta_d")


@dataclass(frozen=True)
class IntegrationBounds:
    """Exclusion radii for each interferer field: terrestrial (v_tb), other
    roads (v1), and the serving road (v0, dedicated serving only), per
    interferer link state."""

    v_tb: tuple[float, float]
    v1: tuple[float, float]
    v0: tuple[float, float] | None


def integration_bounds(ctx: LaplaceContext) -> IntegrationBounds:
    pv = ctx.params.pv
    sbs, sc, d = int(ctx.bs), int(ctx.link), ctx.distance
    v_tb = tuple(K.exclusion(pv, sbs, sc, K.TB, c, d) for c in (0, 1))
    v1 = tuple(K.exclusion(pv, sbs, sc, K.DB, c, d) for c in (0, 1))
    v0 = None
    if ctx.bs is BsKind.Dedicated:
        v0 = tuple(K.exclusion(pv, K.DB, sc, K.DB, c, d) for c in (0, 1))
    return IntegrationBounds(v_tb=v_tb, v1=v1, v0=v0)


def kappa(bs, link, s: float, w: float, params: NetworkConfig) -> float:
    """Laplace factor of a single interferer of kind (bs, link) at horizontal
    distance w, averaged over its fading."""
    return float(K.kappa(params.pv, int(bs), int(link), float(s), float(w)))


class _Tables:
    """Per-(config, s) dedicated-interferer tables shared by the transforms.

    Row j of tabs_l / tabs_n holds the j-th s-derivative magnitude of the
    per-interferer integrand; row 0 (aliased as vals_l / vals_n) is the
    integrand itself."""

    __slots__ = ("pv", "s", "jmax", "meta", "knots",
                 "tabs_l", "tabs_n", "vals_l", "vals_n")

    def __init__(self, params: NetworkConfig, s: float, jmax: int = 0):
        self.pv = params.pv
        self.s = float(s)
        self.jmax = int(jmax)
        self.meta = K.tab_meta(self.pv)
        self.knots = K.tab_knots(self.meta)
        self.tabs_l = K.build_db_tabs(self.pv, self.s, K.LOS, self.knots, self.jmax)
        self.tabs_n = K.build_db_tabs(self.pv, self.s, K.NLOS, self.knots, self.jmax)
        self.vals_l = self.tabs_l[0]
        self.vals_n = self.tabs_n[0]


def _gen_exponent(tab: _Tables, ctx: LaplaceContext, policy: QuadPolicy) -> float:
    e, ok = K.laplace_gen_exponent(
        tab.pv, tab.s, int(ctx.bs), int(ctx.link), ctx.distance,
        tab.vals_l, tab.vals_n, tab.knots, tab.meta,
        policy.rel_tol, policy.abs_tol, policy.max_depth,
    )
    if not ok:
        raise NumericsError("general interference quadrature did not converge")
    return e


def _typ_exponent(tab: _Tables, ctx: LaplaceContext) -> float:
    return K.laplace_typ_exponent(
        tab.pv, tab.s, int(ctx.link), ctx.distance, ctx.theta_d,
        tab.vals_l, tab.vals_n, tab.knots, tab.meta,
    )


def _gen_derivs(tab: _Tables, ctx: LaplaceContext, policy: QuadPolicy) -> np.ndarray:
    """General-field exponent and derivative magnitudes (index 0 = exponent,
    index k = (-1)^(k+1) E^(k) >= 0) at s = tab.s, up to order tab.jmax."""
    out, ok = K.laplace_gen_derivs(
        tab.pv, tab.s, int(ctx.bs), int(ctx.link), ctx.distance,
        tab.tabs_l, tab.tabs_n, tab.knots, tab.meta, tab.jmax,
        policy.rel_tol, policy.abs_tol, policy.max_depth,
    )
    if not ok:
        raise NumericsError("general interference quadrature did not converge")
    return out


def _typ_derivs(tab: _Tables, ctx: LaplaceContext) -> np.ndarray:
    """Serving-road exponent and derivative magnitudes, same layout as
    _gen_derivs."""
    return K.laplace_typ_derivs(
        tab.pv, tab.s, int(ctx.link), ctx.distance, ctx.theta_d,
        tab.tabs_l, tab.tabs_n, tab.knots, tab.meta, tab.jmax,
    )


def laplace_general(s: float, ctx: LaplaceContext,
                    policy: QuadPolicy = DEFAULT_POLICY) -> float:
    """Laplace transform at s of the interference from the terrestrial field
    and every road except the serving one."""
    if s < 0.0:
        raise ValueError("s must be non-negative")
    if s == 0.0:
        return 1.0
    tab = _Tables(ctx.params, s)
    return math.exp(-_gen_exponent(tab, ctx, policy))


def laplace_typical(s: float, ctx: LaplaceContext,
                    policy: QuadPolicy = DEFAULT_POLICY) -> float:
    """Laplace transform at s of the interference from the serving road's
    other BSs.  Only defined for a dedicated serving BS."""
    if ctx.bs is not BsKind.Dedicated:
        raise ValueError("serving-road transform requires a dedicated serving BS")
    if s < 0.0:
        raise ValueError("s must be non-negative")
    if s == 0.0:
        return 1.0
    tab = _Tables(ctx.params, s)
    return math.exp(-_typ_exponent(tab, ctx))


def laplace_interference(s: float, ctx: LaplaceContext,
                         policy: QuadPolicy = DEFAULT_POLICY,
                         include_noise: bool = False) -> float:
    """Laplace transform of the total interference (general field times the
    serving road when applicable), optionally times exp(-s*sigma^2)."""
    if s < 0.0:
        raise ValueError("s must be non-negative")
    if s == 0.0:
        return 1.0
    tab = _Tables(ctx.params, s)
    e = _gen_exponent(tab, ctx, policy)
    if ctx.bs is BsKind.Dedicated:
        e += _typ_exponent(tab, ctx)
    if include_noise:
        e += s * ctx.params.sigma2_w
    return math.exp(-e)


def typical_exponent_batch(s: float, link: LinkKind, d: float,
                           thetas: np.ndarray, params: NetworkConfig) -> np.ndarray:
    """Serving-road exponents for a batch of orientation angles (coverage and
    mean-SINR integrations average over theta)."""
    tab = _Tables(params, s)
    return K.laplace_typ_exponent_batch(
        tab.pv, tab.s, int(link), float(d), np.asarray(thetas, dtype=float),
        tab.vals_l, tab.vals_n, tab.knots, tab.meta,
    )
