"""Coverage probability and conditional mean SINR of the aerial user.

Two evaluations of the conditional success probability coexist:

- "bound": the Gamma-tail device — for Nakagami-m power fading P(h > x) is
  approximated from above by 1 - (1 - exp(-beta2*m*x))^m with
  beta2 = (m!)^(-1/m), which after binomial expansion turns the SINR tail
  into an alternating sum of interference Laplace transforms.  It is exact
  for m = 1 and an upper bound otherwise.
- "exact": for integer m the Erlang tail gives
  P(success) = sum_{j<m} (s0^j/j!) (-1)^j F^(j)(s0) at s0 = m*tau/pbar,
  where F = exp(-A) is the transform of noise-plus-interference; the
  derivatives come from the all-positive Bell recursion over the exponent's
  derivative magnitudes, so there is no cancellation.

Total coverage assembles the exact form (the bound's tail bias is visible
against Monte Carlo at the headline tolerance); integration runs over the
serving distance (Gauss-Legendre per smooth piece, split at the antenna-gain
step) and averages over the serving road's orientation.

The conditional mean SINR integrates the exact success tail over tau, which
collapses to pbar * int_0^inf exp(-s*sigma^2) L_I(s) ds.

All distances are meters; tau and gamma are linear ratios.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels as K
from .channel import BsKind, LinkKind, KINDS
from .config import NetworkConfig
from .distlaw import DistanceLaw, get_law
from .errors import NumericsError
from .interference import (LaplaceContext, _Tables, _gen_derivs, _gen_exponent,
                           _typ_derivs, _typ_exponent)
from .numerics import DEFAULT_POLICY, QuadPolicy, gauss_legendre, theta_nodes

_R_NODES_TB = 192  # the LoS-probability sigmoid sits in the first few
# hundred meters of a multi-km domain and needs this much resolution
_R_NODES_DB = 32  # per piece, below/above the gain step
_S_NODES = 64
_TAIL_EXP = 36.0  # integrate serving distances until the CDF exponent hits this


def _beta2(m: int) -> float:
    return math.factorial(m) ** (-1.0 / m)


def _kernel_policy(policy: QuadPolicy, params: NetworkConfig) -> QuadPolicy:
    """Interference-exponent tolerance used inside the coverage integrals.

    When the dedicated field participates, its tabulated transforms are only
    good to ~1e-4 relative, so requesting less buys nothing but runtime; the
    pure-terrestrial path has no such limit and honours the caller."""
    if params.lam_l <= 0.0 or params.lam_p <= 0.0:
        return policy
    rel = max(policy.rel_tol, 1e-4)
    abs_ = max(policy.abs_tol, 1e-10)
    if rel == policy.rel_tol and abs_ == policy.abs_tol:
        return policy
    return QuadPolicy(rel_tol=rel, abs_tol=abs_, max_depth=policy.max_depth,
                      truncation_radius=policy.truncation_radius,
                      breakpoints=policy.breakpoints)


@dataclass(frozen=True)
class CoverageBreakdown:
    """Coverage probability split by serving-BS kind and link state."""

    total: float
    p_tb_l: float
    p_tb_n: float
    p_db_l: float
    p_db_n: float

    def part(self, bs: BsKind, link: LinkKind) -> float:
        return {
            (BsKind.Tbs, LinkKind.LoS): self.p_tb_l,
            (BsKind.Tbs, LinkKind.NLoS): self.p_tb_n,
            (BsKind.Dedicated, LinkKind.LoS): self.p_db_l,
            (BsKind.Dedicated, LinkKind.NLoS): self.p_db_n,
        }[(bs, link)]


def success_probability(tau: float, ctx: LaplaceContext,
                        policy: QuadPolicy = DEFAULT_POLICY,
                        method: str = "bound") -> float:
    """P(SINR > tau) given the serving link in ctx.

    method "bound" evaluates the binomial-expanded Gamma-tail form (exact for
    m = 1, upper bound otherwise); "exact" evaluates the Erlang tail through
    transform derivatives and is exact for every integer m."""
    if tau <= 0.0:
        raise ValueError("tau must be positive")
    cfg = ctx.params
    m = cfg.m_l if ctx.link is LinkKind.LoS else cfg.m_n
    pbar = K.mean_power(cfg.pv, int(ctx.bs), int(ctx.link), ctx.distance)
    if method == "exact":
        s0 = m * tau / pbar
        tab = _Tables(cfg, s0, jmax=m - 1)
        u = _gen_derivs(tab, ctx, policy)
        if ctx.bs is BsKind.Dedicated:
            u = u + _typ_derivs(tab, ctx)
        a0 = u[0] + s0 * cfg.sigma2_w
        if m > 1:
            u = u.copy()
            u[1] += cfg.sigma2_w
        return float(K.success_from_derivs(m, s0, a0, u))
    if method != "bound":
        raise ValueError("method must be 'bound' or 'exact'")
    s1 = _beta2(m) * m * tau / pbar
    total = 0.0
    for k in range(1, m + 1):
        s = k * s1
        tab = _Tables(cfg, s)
        e = _gen_exponent(tab, ctx, policy) + s * cfg.sigma2_w
        if ctx.bs is BsKind.Dedicated:
            e += _typ_exponent(tab, ctx)
        total += math.comb(m, k) * (-1.0) ** (k + 1) * math.exp(-e)
    return min(max(total, 0.0), 1.0)


# -- coverage integral ---------------------------------------------------------


def _r_hi(law: DistanceLaw, bs: BsKind, link: LinkKind, thetas: np.ndarray) -> float:
    """Serving distance beyond which the nearest-BS density is negligible."""
    rmax = law.r_max
    grid = np.geomspace(1.0, rmax, 192)
    if bs is BsKind.Tbs:
        expo = law.tb_exponent(link, grid)
    else:
        expo = np.min(
            np.stack([law.db_exponent(link, grid, th) for th in thetas]), axis=0)
    idx = np.searchsorted(expo, _TAIL_EXP)
    if idx >= grid.size:
        return rmax
    return float(grid[min(idx + 1, grid.size - 1)])


def _assoc_matrix(law: DistanceLaw, bs: BsKind, link: LinkKind,
                  r: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    """Association probability on the (r, theta) grid.

    Terrestrial competitor voids multiply exactly (independent thinnings of
    one PPP); the dedicated link states share the roads, so their joint void
    enters through db_void_extra on top of the marginal already carried by
    the serving kind's density, plus — for a dedicated serving BS — the
    serving road's other-state void at the road's true offset."""
    pv = law.pv
    total = np.zeros((r.size, thetas.size))
    for oc in (LinkKind.LoS, LinkKind.NLoS):
        if bs is BsKind.Tbs and oc is link:
            continue
        e = np.array([K.exclusion(pv, int(bs), int(link), K.TB, int(oc), ri)
                      for ri in r])
        total += law.tb_exponent(oc, e)[:, None]
    if bs is BsKind.Tbs:
        v_l = np.array([K.exclusion(pv, int(bs), int(link), K.DB, K.LOS, ri)
                        for ri in r])
        v_n = np.array([K.exclusion(pv, int(bs), int(link), K.DB, K.NLOS, ri)
                        for ri in r])
        g = np.asarray(law.db_exponent(LinkKind.LoS, v_l), dtype=float)
        extra = np.array([law.db_void_extra(LinkKind.LoS, vl, LinkKind.NLoS, vn)
                          for vl, vn in zip(v_l, v_n)])
        total += (g + extra)[:, None]
    else:
        other = LinkKind.NLoS if link is LinkKind.LoS else LinkKind.LoS
        v_o = np.array([K.exclusion(pv, int(bs), int(link), K.DB, int(other), ri)
                        for ri in r])
        extra = np.array([law.db_void_extra(link, ri, other, vo)
                          for ri, vo in zip(r, v_o)])
        total += extra[:, None]
        y = r[:, None] * np.sin(thetas)[None, :]
        total += law.serving_road_exponent(other, y, v_o[:, None])
    return np.exp(-total)


def _pdf_matrix(law: DistanceLaw, bs: BsKind, link: LinkKind,
                r: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    """Serving-candidate density on the (r, theta) grid.

    Terrestrial: the nearest-distance density (central difference of the
    CDF), constant across theta.  Dedicated: the joint density of (distance,
    road angle) of the nearest BS of this link state,

        f(r, theta) = 4 pi lam_l lam_p P_c(r) r exp(-G_c(r) - U_c(r, theta)),

    whose theta-integral over (0, pi/2) reproduces d/dr[1 - exp(-G_c)]
    exactly — the all-roads marginal.  Differentiating the theta-conditioned
    CDF instead (as a conditional-given-uniform-theta reading suggests) drags
    the serving road along with r and overshoots the total mass by O(1%),
    which is visible against Monte Carlo at the headline tolerance."""
    if bs is BsKind.Tbs:
        h = np.minimum(np.maximum(0.25, 1e-4 * r), np.maximum(r, 1e-12))
        lo = np.maximum(r - h, 0.0)
        hi = r + h
        f_lo = -np.expm1(-law.tb_exponent(link, lo))
        f_hi = -np.expm1(-law.tb_exponent(link, hi))
        pdf = (f_hi - f_lo) / (2.0 * h)
        return np.repeat(pdf[:, None], thetas.size, axis=1)
    cfg = law.cfg
    dh1 = cfg.dh1_m
    ang = np.degrees(np.arctan2(dh1, np.maximum(r, 0.0)))
    p = 1.0 / (1.0 + cfg.a * np.exp(-cfg.b * (ang - cfg.a)))
    if link is LinkKind.NLoS:
        p = 1.0 - p
    expo = np.empty((r.size, thetas.size))
    for j, th in enumerate(thetas):
        expo[:, j] = law.db_exponent(link, r, th)
    amp = 4.0 * np.pi * cfg.lam_l * cfg.lam_p * p * r
    return amp[:, None] * np.exp(-expo)


def _success_matrix(cfg: NetworkConfig, bs: BsKind, link: LinkKind,
                    tau: float, r: np.ndarray, thetas: np.ndarray,
                    kpol: QuadPolicy) -> np.ndarray:
    """P(SINR > tau | serving at r, theta) on the grid (exact integer-m
    evaluation through transform derivatives)."""
    pv = cfg.pv
    m = cfg.m_l if link is LinkKind.LoS else cfg.m_n
    sigma2 = cfg.sigma2_w
    out = np.zeros((r.size, thetas.size))
    for i, ri in enumerate(r):
        pbar = K.mean_power(pv, int(bs), int(link), ri)
        s0 = m * tau / pbar
        tab = _Tables(cfg, s0, jmax=m - 1)
        ug, ok = K.laplace_gen_derivs(
            pv, s0, int(bs), int(link), ri, tab.tabs_l, tab.tabs_n,
            tab.knots, tab.meta, tab.jmax,
            kpol.rel_tol, kpol.abs_tol, kpol.max_depth)
        if not ok:
            raise NumericsError("interference quadrature did not converge")
        if bs is BsKind.Dedicated:
            ut = K.laplace_typ_derivs_batch(
                pv, s0, int(link), ri, thetas, tab.tabs_l, tab.tabs_n,
                tab.knots, tab.meta, tab.jmax)
            for jt in range(thetas.size):
                u = ug + ut[jt]
                a0 = u[0] + s0 * sigma2
                if m > 1:
                    u[1] += sigma2
                out[i, jt] = K.success_from_derivs(m, s0, a0, u)
        else:
            u = ug.copy()
            a0 = u[0] + s0 * sigma2
            if m > 1:
                u[1] += sigma2
            out[i, :] = K.success_from_derivs(m, s0, a0, u)
    return out


def _kind_nodes(cfg: NetworkConfig, bs: BsKind, r_hi: float):
    """Gauss-Legendre nodes/weights over the serving distance, split at the
    antenna-gain step for dedicated kinds."""
    zdb = cfg.z_db_m
    if bs is BsKind.Dedicated and r_hi > zdb:
        x1, w1 = gauss_legendre(_R_NODES_DB, 0.0, zdb)
        x2, w2 = gauss_legendre(_R_NODES_DB, zdb, r_hi)
        return np.concatenate([x1, x2]), np.concatenate([w1, w2])
    n = _R_NODES_TB if bs is BsKind.Tbs else 2 * _R_NODES_DB
    return gauss_legendre(n, 0.0, r_hi)


def coverage_probability(tau: float, params: NetworkConfig,
                         policy: QuadPolicy = DEFAULT_POLICY) -> CoverageBreakdown:
    """Coverage probability P(SINR > tau), broken down by serving kind."""
    if tau <= 0.0:
        raise ValueError("tau must be positive")
    law = get_law(params, policy)
    kpol = _kernel_policy(policy, params)
    thetas, th_w = theta_nodes(params.theta_nodes)
    parts = {}
    for bs, link in KINDS:
        if bs is BsKind.Dedicated and (params.lam_l <= 0.0 or params.lam_p <= 0.0):
            parts[(bs, link)] = 0.0
            continue
        if bs is BsKind.Tbs and params.lam_tb <= 0.0:
            parts[(bs, link)] = 0.0
            continue
        r_hi = _r_hi(law, bs, link, thetas)
        r, w = _kind_nodes(params, bs, r_hi)
        a = _assoc_matrix(law, bs, link, r, thetas)
        f = _pdf_matrix(law, bs, link, r, thetas)
        p = _success_matrix(params, bs, link, tau, r, thetas, kpol)
        integrand = a * f * p
        # dedicated serving kinds carry a joint (r, theta) density: the theta
        # quadrature integrates (x pi/2) rather than averages
        scale = math.pi / 2.0 if bs is BsKind.Dedicated else 1.0
        parts[(bs, link)] = scale * float(
            np.sum(w[:, None] * integrand * th_w[None, :]))
    total = sum(parts.values())
    return CoverageBreakdown(
        total=min(max(total, 0.0), 1.0),
        p_tb_l=parts[(BsKind.Tbs, LinkKind.LoS)],
        p_tb_n=parts[(BsKind.Tbs, LinkKind.NLoS)],
        p_db_l=parts[(BsKind.Dedicated, LinkKind.LoS)],
        p_db_n=parts[(BsKind.Dedicated, LinkKind.NLoS)],
    )


# -- conditional mean SINR -----------------------------------------------------


def _mean_sinr_link(cfg: NetworkConfig, bs: BsKind, link: LinkKind, d: float,
                    thetas: np.ndarray, th_w: np.ndarray,
                    kpol: QuadPolicy) -> float:
    """E[SINR | serving kind (bs, link) at distance d].

    The tau-integral of the exact success tail collapses (E[h] = 1) to
    pbar * int_0^inf exp(-s*sigma^2) L_I(s) ds, evaluated on a log-s grid
    bracketed where the integrand is flat on the left and decayed on the
    right."""
    pv = cfg.pv
    pbar = K.mean_power(pv, int(bs), int(link), d)
    sigma2 = cfg.sigma2_w

    def z(s: float) -> float:
        tab = _Tables(cfg, s)
        eg, ok = K.laplace_gen_exponent(
            pv, s, int(bs), int(link), d, tab.vals_l, tab.vals_n,
            tab.knots, tab.meta, kpol.rel_tol, kpol.abs_tol, kpol.max_depth)
        if not ok:
            raise NumericsError("interference quadrature did not converge")
        base = eg + s * sigma2
        if bs is BsKind.Dedicated:
            et = K.laplace_typ_exponent_batch(
                pv, s, int(link), d, thetas, tab.vals_l, tab.vals_n,
                tab.knots, tab.meta)
            return float(np.sum(th_w * np.exp(-(base + et))))
        return math.exp(-base)

    s_ref = 1.0 / pbar
    s_hi = s_ref
    for _ in range(80):
        if z(s_hi) < 1e-10:
            break
        s_hi *= 2.0
    else:
        raise NumericsError("mean-SINR Laplace integrand does not decay")
    s_lo = s_ref
    for _ in range(80):
        zl = z(s_lo)
        if 1.0 - zl < 1e-5 or s_lo < 1e-300:
            break
        s_lo *= 0.5
    u, uw = gauss_legendre(_S_NODES, math.log(s_lo), math.log(s_hi))
    s_nodes = np.exp(u)
    integral = s_lo * 0.5 * (1.0 + z(s_lo))
    integral += float(sum(wi * si * z(si) for si, wi in zip(s_nodes, uw)))
    return pbar * integral


def mean_sinr(d: float, bs: BsKind, params: NetworkConfig,
              policy: QuadPolicy = DEFAULT_POLICY) -> float:
    """Mean SINR of an aerial user served by a BS of the given kind at
    horizontal distance d, averaged over the link state and (for dedicated
    BSs) the serving road's orientation."""
    if d < 0.0:
        raise ValueError("d must be non-negative")
    bs = BsKind(bs)
    if bs is BsKind.Dedicated and (params.lam_l <= 0.0 or params.lam_p <= 0.0):
        raise ValueError("no dedicated BSs under this configuration")
    kpol = _kernel_policy(policy, params)
    thetas, th_w = theta_nodes(params.theta_nodes)
    total = 0.0
    for link in (LinkKind.LoS, LinkKind.NLoS):
        p_link = K.pc(params.pv, int(bs), int(link), d)
        if p_link > 0.0:
            total += p_link * _mean_sinr_link(params, bs, link, d, thetas, th_w, kpol)
    return total


def max_distance_for_sinr(gamma: float, bs: BsKind, params: NetworkConfig,
                          policy: QuadPolicy = DEFAULT_POLICY,
                          tol_m: float = 0.1) -> float:
    """Largest horizontal distance d such that the conditional mean SINR
    meets gamma everywhere up to d.

    The mean SINR falls with distance on each antenna-gain piece, jumping up
    when the serving BS enters its mainlobe, so the far (sidelobe) piece is
    searched first.  Close to the truncation radius the interference field
    runs dry and the curve bends back up; the prefix condition makes the
    returned distance usable as a disk radius regardless.  Returns 0 when
    even d=0 falls short."""
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    bs = BsKind(bs)
    gamma_db = 10.0 * math.log10(gamma)
    curve = sinr_curve(params, bs, policy)

    def g(d: float) -> float:
        return mean_sinr(d, bs, params, policy)

    for grid, _, db in reversed(curve.pieces):
        dec = np.minimum.accumulate(db)
        if gamma_db > dec[0] + 1e-9:
            continue
        if gamma_db <= dec[-1]:
            return float(grid[-1])
        # crossing lies inside this piece: bracket by curve nodes, then
        # bisect the live mean SINR down to tol_m
        i = int(np.searchsorted(-dec, -gamma_db, side="right")) - 1
        lo_i = max(i - 1, 0)
        hi_i = min(i + 2, grid.size - 1)
        lo, hi = float(grid[lo_i]), float(grid[hi_i])
        while lo > grid[0] and g(lo) < gamma:
            lo_i = max(lo_i - 1, 0)
            lo = float(grid[lo_i])
            if lo_i == 0:
                break
        if g(lo) < gamma:
            continue
        while hi < grid[-1] and g(hi) >= gamma:
            hi_i = min(hi_i + 1, grid.size - 1)
            hi = float(grid[hi_i])
        if g(hi) >= gamma:
            return float(grid[-1])
        while hi - lo > tol_m:
            mid = 0.5 * (lo + hi)
            if g(mid) >= gamma:
                lo = mid
            else:
                hi = mid
        return lo
    return 0.0


# -- cached mean-SINR curves (trajectory fast path) ----------------------------


class SinrCurve:
    """Piecewise log-distance interpolant of mean_sinr for one BS kind, with
    a monotone inverse used to turn an SINR floor into a disk radius."""

    def __init__(self, cfg: NetworkConfig, bs: BsKind,
                 policy: QuadPolicy = DEFAULT_POLICY):
        self.bs = BsKind(bs)
        self.r_max = cfg.r_max_m
        zdb = cfg.z_db_m
        # ~12 nodes per decade keeps interpolation error < 0.05 dB at any horizon
        n_wide = max(47, int(round(12.0 * math.log10(self.r_max))))
        if self.bs is BsKind.Dedicated and zdb < self.r_max:
            grids = [
                np.concatenate([[0.0], np.geomspace(1.0, zdb * (1.0 - 1e-9), 23)]),
                np.geomspace(zdb, self.r_max, max(40, n_wide - 14)),
            ]
        else:
            grids = [np.concatenate([[0.0], np.geomspace(1.0, self.r_max, n_wide)])]
        self.pieces = []
        for grid in grids:
            vals = np.array([mean_sinr(float(di), self.bs, cfg, policy) for di in grid])
            db = 10.0 * np.log10(vals)
            self.pieces.append((grid, np.log1p(grid), db))

    def value_db(self, d: float) -> float:
        for grid, x, db in self.pieces:
            if d <= grid[-1]:
                return float(np.interp(np.log1p(max(d, 0.0)), x, db))
        grid, x, db = self.pieces[-1]
        return float(db[-1])

    def radius(self, gamma_db: float) -> float:
        """Largest d with curve(d) >= gamma_db (0 if infeasible anywhere)."""
        for grid, x, db in reversed(self.pieces):
            dec = np.minimum.accumulate(db)
            if gamma_db <= dec[-1]:
                return float(grid[-1])
            if gamma_db <= dec[0]:
                xi = np.interp(-gamma_db, -dec, x)
                return float(np.expm1(xi))
        return 0.0

    def gamma_at_best(self) -> float:
        """Highest attainable mean SINR in dB (at d=0)."""
        return float(self.pieces[0][2][0])


@lru_cache(maxsize=16)
def _curve_for(cfg: NetworkConfig, bs: BsKind, policy: QuadPolicy) -> SinrCurve:
    return SinrCurve(cfg, bs, policy)


def sinr_curve(cfg: NetworkConfig, bs: BsKind,
               policy: QuadPolicy = DEFAULT_POLICY) -> SinrCurve:
    return _curve_for(cfg, BsKind(bs), policy)
