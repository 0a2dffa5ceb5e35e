"""Monte Carlo oracle for the analytical stack.

Every estimator here re-derives the model from sampled realizations alone --
no analytic shortcuts -- so agreement with the closed-form stack is evidence,
not tautology.  Realizations are drawn on a square window whose incircle
matches the analytic truncation radius, so nearest-distance and coverage
events inside that radius are distribution-exact.

Reproducibility: replication i always uses the substream
SeedSequence(seed, spawn_key=(i,)), so estimates are invariant to worker
count and chunking.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import KINDS, BsKind, LinkKind
from .config import NetworkConfig
from .geometry import NetworkRealization, sample_realization
from .interference import LaplaceContext, integration_bounds

_Z95 = 1.959963984540054


def _rng_for(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _plos_vec(d_m: np.ndarray, dh_m: float, cfg: NetworkConfig) -> np.ndarray:
    ang = np.degrees(np.arctan2(dh_m, d_m))
    return 1.0 / (1.0 + cfg.a * np.exp(-cfg.b * (ang - cfg.a)))


def _mean_power_vec(cfg: NetworkConfig, bs: BsKind, los: np.ndarray,
                    d_m: np.ndarray) -> np.ndarray:
    if bs is BsKind.Tbs:
        amp = cfg.rho_tb_w * cfg.g_s
        dh2 = cfg.dh2_m ** 2
    else:
        gain = np.where(d_m < cfg.z_db_m, cfg.g_m, cfg.g_s)
        amp = cfg.rho_db_w * gain
        dh2 = cfg.dh1_m ** 2
    dist2 = d_m * d_m + dh2
    return amp * np.where(
        los,
        cfg.eta_l * dist2 ** (-0.5 * cfg.alpha_l),
        cfg.eta_n * dist2 ** (-0.5 * cfg.alpha_n),
    )


@dataclass(frozen=True)
class SinrSample:
    """One realization's SINR at the origin plus the serving link identity."""

    sinr: float
    serving_bs: BsKind
    serving_link: LinkKind
    serving_distance_m: float

    @property
    def serving(self) -> tuple[BsKind, LinkKind]:
        return self.serving_bs, self.serving_link


def _field_arrays(realization: NetworkRealization, cfg: NetworkConfig,
                  rng: np.random.Generator):
    """Distances (m), LoS marks, and mean powers for every BS; dedicated BSs
    listed first so exact power ties resolve toward the dedicated kind.

    The field is restricted to the truncation disk, matching the analytic
    model exactly; the square window's corners would otherwise contribute
    far-field interference the analysis deliberately truncates.

    LoS states are drawn once per BS here and reused for both association
    and interference (they are static marks of the realization)."""
    db_m = realization.dedicated * 1000.0
    tb_m = realization.tbs * 1000.0
    d_db = np.hypot(db_m[:, 0], db_m[:, 1]) if db_m.size else np.empty(0)
    d_tb = np.hypot(tb_m[:, 0], tb_m[:, 1]) if tb_m.size else np.empty(0)
    d_db = d_db[d_db <= cfg.r_max_m]
    d_tb = d_tb[d_tb <= cfg.r_max_m]
    los_db = rng.random(d_db.size) < _plos_vec(d_db, cfg.dh1_m, cfg)
    los_tb = rng.random(d_tb.size) < _plos_vec(d_tb, cfg.dh2_m, cfg)
    dist = np.concatenate([d_db, d_tb])
    los = np.concatenate([los_db, los_tb])
    kind_is_db = np.concatenate([np.ones(d_db.size, bool), np.zeros(d_tb.size, bool)])
    pbar = np.concatenate([
        _mean_power_vec(cfg, BsKind.Dedicated, los_db, d_db),
        _mean_power_vec(cfg, BsKind.Tbs, los_tb, d_tb),
    ])
    return dist, los, kind_is_db, pbar


def simulate_sinr_at_origin(realization: NetworkRealization, cfg: NetworkConfig,
                            rng: np.random.Generator) -> SinrSample:
    """SINR of an aerial user at the origin under max-mean-power association
    and independent Nakagami power fading per link; the serving BS is
    excluded from the interference sum.

    Raises ValueError if the realization contains no base station.
    """
    dist, los, kind_is_db, pbar = _field_arrays(realization, cfg, rng)
    if dist.size == 0:
        raise ValueError("no server: realization contains no base station")
    idx = int(np.argmax(pbar))
    m = np.where(los, cfg.m_l, cfg.m_n).astype(float)
    h = rng.gamma(m, 1.0 / m)
    power = pbar * h
    signal = power[idx]
    interference = float(np.sum(power)) - signal
    sinr = signal / (cfg.sigma2_w + interference)
    return SinrSample(
        sinr=float(sinr),
        serving_bs=BsKind.Dedicated if kind_is_db[idx] else BsKind.Tbs,
        serving_link=LinkKind.LoS if los[idx] else LinkKind.NLoS,
        serving_distance_m=float(dist[idx]),
    )


@dataclass(frozen=True)
class CoverageEstimate:
    p_hat: float
    ci_lo: float
    ci_hi: float
    iterations: int


def wilson_interval(successes: int, n: int, z: float = _Z95) -> tuple[float, float]:
    if n <= 0:
        return 0.0, 1.0
    p = successes / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def _coverage_chunk(args) -> int:
    cfg, tau, seed, i0, i1 = args
    count = 0
    for i in range(i0, i1):
        rng = _rng_for(seed, i)
        realization = sample_realization(cfg, rng)
        try:
            sample = simulate_sinr_at_origin(realization, cfg, rng)
        except ValueError:
            continue  # no server: not covered
        if sample.sinr > tau:
            count += 1
    return count


def estimate_coverage(cfg: NetworkConfig, tau: float, iterations: int,
                      seed: int, workers: int = 1) -> CoverageEstimate:
    """MC coverage probability with a 95% Wilson interval."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if workers <= 1:
        successes = _coverage_chunk((cfg, tau, seed, 0, iterations))
    else:
        bounds = np.linspace(0, iterations, workers + 1).astype(int)
        jobs = [(cfg, tau, seed, int(a), int(b))
                for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            successes = sum(pool.map(_coverage_chunk, jobs))
    lo, hi = wilson_interval(successes, iterations)
    return CoverageEstimate(successes / iterations, lo, hi, iterations)


@dataclass(frozen=True)
class EmpiricalCdf:
    """Sorted nearest-BS distances (meters); realizations with no BS of the
    requested kind contribute mass beyond every finite r (defective law)."""

    distances_m: np.ndarray
    iterations: int

    def evaluate(self, r) -> np.ndarray:
        return np.searchsorted(self.distances_m, r, side="right") / self.iterations


def empirical_distance_cdfs(cfg: NetworkConfig, iterations: int,
                            seed: int) -> dict:
    """Empirical laws of the horizontal distance to the nearest BS, for all
    four (BsKind, LinkKind) pairs from the same realizations.  Exact for
    radii up to the window incircle."""
    out = {kind: np.empty(iterations) for kind in KINDS}
    for i in range(iterations):
        rng = _rng_for(seed, i)
        realization = sample_realization(cfg, rng)
        dist, los, kind_is_db, _ = _field_arrays(realization, cfg, rng)
        for bs, link in KINDS:
            sel = (kind_is_db == (bs is BsKind.Dedicated)) \
                & (los == (link is LinkKind.LoS))
            out[(bs, link)][i] = dist[sel].min() if np.any(sel) else np.inf
    return {
        kind: EmpiricalCdf(distances_m=np.sort(v), iterations=iterations)
        for kind, v in out.items()
    }


def empirical_distance_cdf(kind, cfg: NetworkConfig, iterations: int,
                           seed: int) -> EmpiricalCdf:
    """Empirical law of the horizontal distance to the nearest BS of one
    (BsKind, LinkKind) pair.  Exact for radii up to the window incircle."""
    bs, link = BsKind(kind[0]), LinkKind(kind[1])
    return empirical_distance_cdfs(cfg, iterations, seed)[(bs, link)]


# -- conditional-field samplers --------------------------------------------------
#
# Given a serving BS of one kind/link at distance d (and road angle theta for
# a dedicated server), the competing field is the original process thinned by
# the association exclusion radii.  Sampling that thinned field directly
# yields unbiased draws of the conditional interference, with no rejection.


def _interference_draw(ctx: LaplaceContext, rng: np.random.Generator,
                       which: str) -> float:
    """One draw of aggregate interference power for the requested component
    ('general': TBS field plus all non-serving roads; 'typical': the serving
    road), thinned by the context's exclusion radii."""
    cfg = ctx.params
    rmax = cfg.r_max_m
    bounds = integration_bounds(ctx)
    total = 0.0

    def add(bs: BsKind, d_m: np.ndarray, dh: float, cut: tuple[float, float]):
        nonlocal total
        if d_m.size == 0:
            return
        los = rng.random(d_m.size) < _plos_vec(d_m, dh, cfg)
        keep = d_m >= np.where(los, cut[0], cut[1])
        if not np.any(keep):
            return
        los = los[keep]
        d_keep = d_m[keep]
        pbar = _mean_power_vec(cfg, bs, los, d_keep)
        m = np.where(los, cfg.m_l, cfg.m_n).astype(float)
        total += float(np.sum(pbar * rng.gamma(m, 1.0 / m)))

    if which == "general":
        n_tb = rng.poisson(cfg.lam_tb * math.pi * rmax * rmax)
        r_tb = rmax * np.sqrt(rng.random(n_tb))
        add(BsKind.Tbs, r_tb, cfg.dh2_m, bounds.v_tb)
        if cfg.lam_l > 0.0 and cfg.lam_p > 0.0:
            n_lines = rng.poisson(2.0 * math.pi * cfg.lam_l * rmax)
            rho = rmax * (2.0 * rng.random(n_lines) - 1.0)
            half = np.sqrt(np.maximum(rmax * rmax - rho * rho, 0.0))
            k = rng.poisson(cfg.lam_p * 2.0 * half)
            t = rng.uniform(-1.0, 1.0, int(k.sum())) * np.repeat(half, k)
            add(BsKind.Dedicated, np.hypot(t, np.repeat(rho, k)), cfg.dh1_m,
                bounds.v1)
    elif which == "typical":
        yl = ctx.distance * math.sin(ctx.theta_d)
        if yl < rmax and cfg.lam_p > 0.0:
            half = math.sqrt(rmax * rmax - yl * yl)
            k = rng.poisson(cfg.lam_p * 2.0 * half)
            if k:
                t = half * (2.0 * rng.random(k) - 1.0)
                add(BsKind.Dedicated, np.hypot(t, yl), cfg.dh1_m, bounds.v0)
    else:
        raise ValueError("which must be 'general' or 'typical'")
    return total


@dataclass(frozen=True)
class LaplaceEstimate:
    mean: np.ndarray
    std_err: np.ndarray
    iterations: int


def estimate_laplace(s_values, ctx: LaplaceContext, iterations: int, seed: int,
                     which: str = "general") -> LaplaceEstimate:
    """MC estimate of E[exp(-s I)] for the general or typical (serving-road)
    interference component."""
    if which == "typical" and ctx.bs is not BsKind.Dedicated:
        raise ValueError("typical component requires a dedicated serving BS")
    s = np.asarray(s_values, dtype=float)
    acc = np.zeros(s.size)
    acc2 = np.zeros(s.size)
    for i in range(iterations):
        rng = _rng_for(seed, i)
        e = np.exp(-s * _interference_draw(ctx, rng, which))
        acc += e
        acc2 += e * e
    mean = acc / iterations
    var = np.maximum(acc2 / iterations - mean * mean, 0.0)
    std_err = np.sqrt(var / iterations)
    return LaplaceEstimate(mean=mean, std_err=std_err, iterations=iterations)


def _conditional_sinr_draw(ctx: LaplaceContext, rng: np.random.Generator) -> float:
    cfg = ctx.params
    serving_pbar = float(_mean_power_vec(
        cfg, ctx.bs, np.array([ctx.link is LinkKind.LoS]),
        np.array([ctx.distance]))[0])
    interference = _interference_draw(ctx, rng, "general")
    if ctx.bs is BsKind.Dedicated:
        interference += _interference_draw(ctx, rng, "typical")
    m = float(cfg.m_l if ctx.link is LinkKind.LoS else cfg.m_n)
    h = rng.gamma(m, 1.0 / m)
    return serving_pbar * h / (cfg.sigma2_w + interference)


def estimate_success_probability(tau: float, ctx: LaplaceContext,
                                 iterations: int, seed: int) -> CoverageEstimate:
    """MC estimate of P(SINR > tau | serving link ctx) over the thinned
    conditional field."""
    count = 0
    for i in range(iterations):
        if _conditional_sinr_draw(ctx, _rng_for(seed, i)) > tau:
            count += 1
    lo, hi = wilson_interval(count, iterations)
    return CoverageEstimate(count / iterations, lo, hi, iterations)


def estimate_mean_sinr(d: float, bs: BsKind, cfg: NetworkConfig,
                       iterations: int, seed: int) -> tuple[float, float]:
    """MC estimate of E[SINR | serving kind at horizontal distance d], mixing
    the link state by its probability at d and (for a dedicated server) the
    road angle uniformly on [0, pi/2].

    Returns (estimate, standard_error)."""
    bs = BsKind(bs)
    dh = cfg.dh1_m if bs is BsKind.Dedicated else cfg.dh2_m
    p_los = float(_plos_vec(np.array([float(d)]), dh, cfg)[0])
    acc = 0.0
    acc2 = 0.0
    for i in range(iterations):
        rng = _rng_for(seed, i)
        link = LinkKind.LoS if rng.random() < p_los else LinkKind.NLoS
        theta = rng.uniform(0.0, math.pi / 2.0) if bs is BsKind.Dedicated else None
        ctx = LaplaceContext(bs=bs, link=link, distance=float(d),
                             theta_d=theta, params=cfg)
        value = _conditional_sinr_draw(ctx, rng)
        acc += value
        acc2 += value * value
    mean = acc / iterations
    var = max(acc2 / iterations - mean * mean, 0.0)
    return mean, math.sqrt(var / iterations)
