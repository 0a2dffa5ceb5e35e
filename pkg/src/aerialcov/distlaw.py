"""Nearest-BS distance laws and the association probability.

The terrestrial law uses direct quadrature of its exponent.  The dedicated
law needs the half-line LoS/NLoS mass W_c(y, T) = int_0^T P_c(sqrt(y^2+z^2)) dz
and the all-roads exponent G_c(r); both are precomputed per configuration on
log-spaced grids and interpolated, which keeps every CDF query cheap enough
for the coverage integrals.

Distances are meters throughout.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from . import _kernels as K
from .channel import BsKind, LinkKind
from .config import NetworkConfig
from .errors import NumericsError
from .numerics import DEFAULT_POLICY, QuadPolicy, gauss_legendre

_W_RHO_N = 512
_W_Z_N = 1024
_G_R_N = 1024
_GRID_MIN = 0.5  # meters


def _loggrid(lo: float, hi: float, n: int) -> np.ndarray:
    g = np.empty(n)
    g[0] = 0.0
    g[1:] = np.geomspace(lo, hi, n - 1)
    return g


@dataclass(frozen=True)
class _KindLaw:
    """Precomputed dedicated-law tables for one link state."""

    w_interp: RegularGridInterpolator
    g_r: np.ndarray
    g_vals: np.ndarray

    def w(self, y, t):
        y = np.clip(y, 0.0, self.w_interp.grid[0][-1])
        t = np.clip(t, 0.0, self.w_interp.grid[1][-1])
        return self.w_interp(np.stack(np.broadcast_arrays(y, t), axis=-1))

    def g(self, r):
        return np.interp(r, self.g_r, self.g_vals)


class DistanceLaw:
    """Analytic nearest-BS distance laws for one network configuration."""

    def __init__(self, cfg: NetworkConfig, policy: QuadPolicy = DEFAULT_POLICY):
        self.cfg = cfg
        self.policy = policy
        self.pv = cfg.pv
        self.r_max = cfg.r_max_m
        self._kind: dict[LinkKind, _KindLaw] = {}
        for link in (LinkKind.LoS, LinkKind.NLoS):
            self._kind[link] = self._build(link)

    def _build(self, link: LinkKind) -> _KindLaw:
        rmax = self.r_max
        rho = _loggrid(_GRID_MIN, rmax, _W_RHO_N)
        z = _loggrid(_GRID_MIN, rmax, _W_Z_N)
        dd = np.hypot(rho[:, None], z[None, :])
        dh1 = self.cfg.dh1_m
        p = 1.0 / (1.0 + self.cfg.a * np.exp(
            -self.cfg.b * (np.degrees(np.arctan2(dh1, dd)) - self.cfg.a)))
        if link is LinkKind.NLoS:
            p = 1.0 - p
        w2d = np.empty_like(p)
        w2d[:, 0] = 0.0
        mids = 0.5 * (p[:, 1:] + p[:, :-1]) * np.diff(z)[None, :]
        np.cumsum(mids, axis=1, out=w2d[:, 1:])
        interp = RegularGridInterpolator((rho, z), w2d, method="linear")

        r_grid = _loggrid(_GRID_MIN, rmax, _G_R_N)
        g_vals = np.zeros(_G_R_N)
        lam_l = self.cfg.lam_l
        lam_p = self.cfg.lam_p
        if lam_l > 0.0 and lam_p > 0.0:
            x96, w96 = gauss_legendre(96, 0.0, 1.0)
            # rho = r*sin(u*pi/2) soaks up the sqrt cusp at the rim
            u = x96 * (np.pi / 2.0)
            sin_u = np.sin(u)
            cos_u = np.cos(u)
            for i, r in enumerate(r_grid[1:], start=1):
                rr = r * sin_u
                tt = r * cos_u
                pts = np.stack([rr, tt], axis=-1)
                wv = interp(pts)
                integ = -np.expm1(-2.0 * lam_p * wv)
                g_vals[i] = 2.0 * np.pi * lam_l * r * (np.pi / 2.0) * np.sum(
                    w96 * cos_u * integ)
        return _KindLaw(w_interp=interp, g_r=r_grid, g_vals=g_vals)

    # -- exponents -----------------------------------------------------------

    def tb_exponent(self, link: LinkKind, r) -> np.ndarray:
        pol = self.policy
        out = np.empty(np.shape(r) or (1,))
        flat = np.ravel(np.asarray(r, dtype=float))
        for i, ri in enumerate(flat):
            v, ok = K.cdf_exp_tb(self.pv, int(link), ri, pol.rel_tol, pol.abs_tol, pol.max_depth)
            if not ok:
                raise NumericsError("nearest-TBS exponent quadrature did not converge")
            out.flat[i] = v
        return out.reshape(np.shape(r)) if np.shape(r) else out[0]

    def db_exponent(self, link: LinkKind, r, theta_d=None):
        """U + G for the conditional law, G alone for the unconditional one."""
        law = self._kind[link]
        rc = np.clip(r, 0.0, self.r_max)
        g = np.asarray(law.g(rc), dtype=float)
        if theta_d is not None:
            y = rc * np.sin(theta_d)
            t = rc * np.cos(theta_d)
            shape = np.broadcast_shapes(np.shape(y), np.shape(t))
            g = g + 2.0 * self.cfg.lam_p * law.w(y, t).reshape(shape)
        return float(g) if g.ndim == 0 else g

    def serving_road_exponent(self, link: LinkKind, y, r):
        """Void exponent for dedicated BSs of one link state on a single road
        at perpendicular offset y, within horizontal distance r of the user:
        2 lam_p W_link(y, sqrt(r^2 - y^2)); 0 when the road misses the disk.
        Broadcasts over y and r."""
        scalar = np.ndim(y) == 0 and np.ndim(r) == 0
        y_arr, r_arr = np.broadcast_arrays(np.asarray(y, dtype=float),
                                           np.minimum(np.asarray(r, dtype=float),
                                                      self.r_max))
        lam_p = self.cfg.lam_p
        if lam_p <= 0.0:
            out = np.zeros(y_arr.shape)
        else:
            t = np.sqrt(np.maximum(r_arr * r_arr - y_arr * y_arr, 0.0))
            w = np.asarray(self._kind[LinkKind(link)].w(y_arr, t))
            out = np.where(t > 0.0, 2.0 * lam_p * w.reshape(t.shape), 0.0)
        return float(out) if scalar else out

    def db_void_extra(self, base_link: LinkKind, r_base: float,
                      other_link: LinkKind, r_other: float) -> float:
        """Exponent increment that turns the marginal all-roads void of
        base_link within r_base into the joint void also excluding other_link
        within r_other.

        Both dedicated link states ride the same roads, so their voids are
        positively correlated and the joint exponent is smaller than the sum
        of the marginals; the difference integrand
        exp(-2 lam_p W_base) * (1 - exp(-2 lam_p W_other)) is supported on
        road offsets inside the other disk only."""
        lam_l = self.cfg.lam_l
        lam_p = self.cfg.lam_p
        if lam_l <= 0.0 or lam_p <= 0.0:
            return 0.0
        ro = min(float(r_other), self.r_max)
        if ro <= 0.0:
            return 0.0
        rb = min(float(r_base), self.r_max)
        base = self._kind[LinkKind(base_link)]
        other = self._kind[LinkKind(other_link)]
        total = 0.0
        cut = min(rb, ro)
        for lo, hi in ((0.0, cut), (cut, ro)):
            if hi <= lo:
                continue
            # rho = hi*sin(v) soaks up the square-root cusp at the disk rim
            v_lo = np.arcsin(min(lo / hi, 1.0))
            x, w = gauss_legendre(64, float(v_lo), np.pi / 2.0)
            rho = hi * np.sin(x)
            jac = hi * np.cos(x)
            t_b = np.sqrt(np.maximum(rb * rb - rho * rho, 0.0))
            t_o = np.sqrt(np.maximum(ro * ro - rho * rho, 0.0))
            wb = base.w(rho, t_b)
            wo = other.w(rho, t_o)
            integ = np.exp(-2.0 * lam_p * wb) * (-np.expm1(-2.0 * lam_p * wo))
            total += float(np.sum(w * jac * integ))
        return 2.0 * np.pi * lam_l * total


@lru_cache(maxsize=8)
def _law_for(cfg: NetworkConfig, policy: QuadPolicy) -> DistanceLaw:
    return DistanceLaw(cfg, policy)


def get_law(cfg: NetworkConfig, policy: QuadPolicy = DEFAULT_POLICY) -> DistanceLaw:
    return _law_for(cfg, policy)


def nearest_cdf(kind, r, params: NetworkConfig, theta_d=None,
                policy: QuadPolicy = DEFAULT_POLICY):
    """CDF of the horizontal distance to the nearest BS of the given
    (BsKind, LinkKind) pair.

    For dedicated kinds, theta_d=None gives the law over all roads; a
    numeric theta_d conditions on the serving road's orientation angle.
    """
    bs, link = kind
    law = get_law(params, policy)
    if bs is BsKind.Tbs or bs == int(BsKind.Tbs):
        e = law.tb_exponent(LinkKind(link), r)
    else:
        e = law.db_exponent(LinkKind(link), r, theta_d)
    return -np.expm1(-e)


def nearest_pdf(kind, r, params: NetworkConfig, theta_d=None,
                policy: QuadPolicy = DEFAULT_POLICY):
    """Density of the nearest-BS law via central differences of the CDF."""
    r_arr = np.asarray(r, dtype=float)
    h = np.maximum(0.25, 1e-4 * r_arr)
    h = np.minimum(h, np.maximum(r_arr, 1e-12))
    lo = nearest_cdf(kind, r_arr - h, params, theta_d, policy)
    hi = nearest_cdf(kind, r_arr + h, params, theta_d, policy)
    out = (hi - lo) / (2.0 * h)
    out = np.where(r_arr <= 0.0, 0.0, out)
    return float(out) if np.ndim(r) == 0 else out


def exclusion_distance(serving, other, d: float, params: NetworkConfig) -> float:
    """Horizontal distance below which a BS of the `other` (kind, link) pair
    would beat the serving BS's mean power; the serving pair at distance d
    maps to itself."""
    sbs, sc = serving
    obs, oc = other
    return float(K.exclusion(params.pv, int(sbs), int(sc), int(obs), int(oc), float(d)))


def association_probability(kind, d: float, params: NetworkConfig, theta_d=None,
                            policy: QuadPolicy = DEFAULT_POLICY) -> float:
    """Probability that no competing BS kind offers more mean power than the
    serving (kind, link) pair at horizontal distance d.

    Terrestrial link states come from independent thinnings of one PPP, so
    their void probabilities multiply exactly.  The dedicated link states
    share the road system: their joint void is evaluated through the shared
    roads (db_void_extra) and, when the serving BS is dedicated, the serving
    road's own other-state void at the road's true offset d*sin(theta_d)."""
    bs, link = BsKind(kind[0]), LinkKind(kind[1])
    law = get_law(params, policy)
    total = 0.0
    for oc in (LinkKind.LoS, LinkKind.NLoS):
        if (BsKind.Tbs, oc) == (bs, link):
            continue
        e = exclusion_distance((bs, link), (BsKind.Tbs, oc), d, params)
        total += law.tb_exponent(oc, e)
    if bs is BsKind.Tbs:
        v_l = exclusion_distance((bs, link), (BsKind.Dedicated, LinkKind.LoS), d, params)
        v_n = exclusion_distance((bs, link), (BsKind.Dedicated, LinkKind.NLoS), d, params)
        total += law.db_exponent(LinkKind.LoS, v_l)
        total += law.db_void_extra(LinkKind.LoS, v_l, LinkKind.NLoS, v_n)
    else:
        other = LinkKind.NLoS if link is LinkKind.LoS else LinkKind.LoS
        v_o = exclusion_distance((bs, link), (BsKind.Dedicated, other), d, params)
        if theta_d is None:
            raise ValueError("dedicated serving kind requires theta_d")
        total += law.serving_road_exponent(other, d * np.sin(theta_d), v_o)
        total += law.db_void_extra(link, d, other, v_o)
    return float(np.exp(-total))
