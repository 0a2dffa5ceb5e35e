"""End-to-end acceptance suite.

Each test checks one release criterion at its stated tolerance and prints a
single ``[PASS]``/``[FAIL]`` line with the measured numbers (the soft
trajectory-shape study prints ``[REPORT]`` instead, since it is reported but
not gated).  The lines are written through pytest's capture to the real
terminal so the acceptance record is visible even on green runs.

Budget note: the Monte Carlo cross-checks and the 200-realization route
batches make this module deliberately slow (roughly half an hour end to
end); every budget is asserted where a criterion states one.
"""

from __future__ import annotations

import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from aerialcov.channel import BsKind, LinkKind
from aerialcov.coverage import coverage_probability
from aerialcov.distlaw import nearest_cdf
from aerialcov.geometry import Window, sample_realization
from aerialcov.interference import (LaplaceContext, laplace_general,
                                    laplace_interference, laplace_typical)
from aerialcov.montecarlo import (_interference_draw, _rng_for,
                                  empirical_distance_cdfs, estimate_coverage,
                                  estimate_laplace)
from aerialcov.trajectory import (CircleChain, boundary_baseline,
                                  build_bs_graph, default_endpoints,
                                  max_min_sinr, min_time_trajectory,
                                  segment_covered)

from test_coverage import tbs_only_oracle

ROOT = Path(__file__).resolve().parent.parent

# Fixed substream bases so every criterion is reproducible in isolation.
SEED_COVERAGE = 101
SEED_DISTANCE = 105
SEED_LAPLACE = 0
SEED_ROUTES = 107
SEED_SHAPE = 109

N_ROUTE_REALIZATIONS = 200


def _verdict(name: str, ok: bool, detail: str) -> None:
    tag = "PASS" if ok else "FAIL"
    line = f"[{tag}] {name}: {detail}"
    print(line)
    if sys.stdout is not sys.__stdout__:  # under pytest capture
        sys.__stdout__.write(line + "\n")
        sys.__stdout__.flush()
    assert ok, line


def _report(name: str, detail: str) -> None:
    line = f"[REPORT] {name}: {detail}"
    print(line)
    if sys.stdout is not sys.__stdout__:
        sys.__stdout__.write(line + "\n")
        sys.__stdout__.flush()


# -- coverage probability ----------------------------------------------------------


def test_c01_urban_coverage_tracks_monte_carlo(urban):
    """Analytic coverage within 0.03 of a 1e5-iteration MC estimate at
    tau = 0 dB across five dedicated-BS densities, under a 20-minute cap."""
    t0 = time.monotonic()
    rows = []
    worst = 0.0
    for lam_p in (0.0, 0.2, 0.5, 1.0, 2.0):
        cfg = urban.replace(lambda_p_per_km=lam_p)
        ana = coverage_probability(cfg.tau, cfg).total
        mc = estimate_coverage(cfg, cfg.tau, 100_000, seed=SEED_COVERAGE)
        diff = abs(ana - mc.p_hat)
        worst = max(worst, diff)
        rows.append(f"lam_p={lam_p:g} ana={ana:.4f} mc={mc.p_hat:.4f}"
                    f" |d|={diff:.4f}")
    elapsed = time.monotonic() - t0
    ok = worst <= 0.03 and elapsed <= 1200.0
    _verdict("criterion-1 coverage-vs-mc (urban, tau=0dB)", ok,
             f"worst |diff|={worst:.4f} tol=0.03, wall={elapsed:.0f}s"
             f" cap=1200s | " + "; ".join(rows))


def _argmax_density(cfg_base, grid):
    cov = [coverage_probability(cfg_base.tau,
                                cfg_base.replace(lambda_p_per_km=g)).total
           for g in grid]
    k = int(np.argmax(cov))
    return k, cov


def test_c02_urban_optimal_density_bracket(urban):
    """The lambda_p maximizing analytic coverage gives a dedicated-BS
    density pi*lambda_l*lambda_p inside [2, 8] per km^2."""
    grid = (0.2, 0.3, 0.45, 0.6, 0.8, 1.0, 1.3, 1.7, 2.2, 2.8, 3.5)
    k, cov = _argmax_density(urban, grid)
    interior = 0 < k < len(grid) - 1
    mu = math.pi * urban.lambda_l_km_per_km2 * grid[k]
    ok = interior and 2.0 <= mu <= 8.0
    _verdict("criterion-2 urban optimal dedicated density", ok,
             f"argmax lam_p={grid[k]:g} (interior={interior}),"
             f" density={mu:.2f}/km^2 in [2, 8] | cov="
             + ",".join(f"{c:.4f}" for c in cov))


def test_c03_rural_optimal_density_bracket(rural):
    """Same argmax bracket for the rural parameter set: [0.3, 1.5] per km^2."""
    grid = (0.03, 0.05, 0.08, 0.12, 0.18, 0.25, 0.35, 0.5, 0.7, 1.0, 1.4)
    k, cov = _argmax_density(rural, grid)
    interior = 0 < k < len(grid) - 1
    mu = math.pi * rural.lambda_l_km_per_km2 * grid[k]
    ok = interior and 0.3 <= mu <= 1.5
    _verdict("criterion-3 rural optimal dedicated density", ok,
             f"argmax lam_p={grid[k]:g} (interior={interior}),"
             f" density={mu:.2f}/km^2 in [0.3, 1.5] | cov="
             + ",".join(f"{c:.4f}" for c in cov))


def test_c04_terrestrial_only_matches_independent_formula(urban):
    """With the dedicated tier removed the pipeline must agree with an
    independently coded single-tier formula to 1e-6 at three thresholds."""
    cfg0 = urban.replace(lambda_p_per_km=0.0)
    rows = []
    worst = 0.0
    for tau in (0.1, 1.0, 10.0):
        ref = tbs_only_oracle(cfg0, tau)
        got = coverage_probability(tau, cfg0).total
        diff = abs(got - ref)
        worst = max(worst, diff)
        rows.append(f"tau={tau:g} got={got:.8f} ref={ref:.8f} |d|={diff:.2e}")
    ok = worst <= 1e-6
    _verdict("criterion-4 single-tier cross-check", ok,
             f"worst |diff|={worst:.2e} tol=1e-6 | " + "; ".join(rows))


# -- distance laws and interference transforms --------------------------------------


def test_c05_nearest_distance_cdfs_ks(urban):
    """Two-sided KS distance <= 0.01 between each analytic nearest-BS law
    and its empirical law over 1e5 realizations."""
    cdfs = empirical_distance_cdfs(urban, 100_000, seed=SEED_DISTANCE)
    rows = []
    worst = 0.0
    for (bs, link), emp in sorted(cdfs.items(), key=lambda kv: str(kv[0])):
        r = emp.distances_m
        n = emp.iterations
        model = nearest_cdf((bs, link), r, urban)
        i = np.arange(r.size)
        ks = max(float(np.max(np.abs(model - (i + 1) / n))),
                 float(np.max(np.abs(model - i / n))))
        # beyond the largest sample the empirical law is flat at r.size/n
        # while the model keeps rising to its total mass
        tail = abs(float(nearest_cdf((bs, link), urban.r_max_m, urban))
                   - r.size / n)
        ks = max(ks, tail)
        worst = max(worst, ks)
        rows.append(f"{bs.name.lower()}-{link.name.lower()} ks={ks:.4f}")
    ok = worst <= 0.01
    _verdict("criterion-5 nearest-distance laws", ok,
             f"worst ks={worst:.4f} tol=0.01 n=100000 | " + "; ".join(rows))


def test_c06_laplace_transforms_vs_monte_carlo(urban):
    """Both interference components within 3 sigma of MC at three s values
    per serving configuration, and exactly 1 at s = 0."""
    contexts = [
        (BsKind.Tbs, LinkKind.LoS, 200.0, None),
        (BsKind.Dedicated, LinkKind.LoS, 300.0, math.pi / 4),
        (BsKind.Dedicated, LinkKind.NLoS, 500.0, math.pi / 3),
    ]
    rows = []
    worst_z = 0.0
    worst_unit = 0.0
    for bs, link, d, theta in contexts:
        ctx = LaplaceContext(bs, link, d, theta, urban)
        transforms = [("general", laplace_general),
                      ("whole", laplace_interference)]
        components = [("general", laplace_general)]
        if bs is BsKind.Dedicated:
            transforms.append(("typical", laplace_typical))
            components.append(("typical", laplace_typical))
        for _, fn in transforms:
            worst_unit = max(worst_unit, abs(fn(0.0, ctx) - 1.0))
        for which, fn in components:
            # anchor the probe grid at this component's mean interference
            mean_i = np.mean([
                _interference_draw(ctx, _rng_for(SEED_LAPLACE, i), which)
                for i in range(400)
            ])
            s = np.array([0.3, 1.0, 3.0]) / max(float(mean_i), 1e-30)
            mc = estimate_laplace(s, ctx, 10_000, SEED_LAPLACE, which=which)
            ana = np.array([fn(float(si), ctx) for si in s])
            z = float(np.max(np.abs(ana - mc.mean)
                             / np.maximum(mc.std_err, 1e-12)))
            worst_z = max(worst_z, z)
            rows.append(f"{bs.name.lower()}-{link.name.lower()}-d{d:g}"
                        f"-{which} max|z|={z:.2f}")
    ok = worst_z <= 3.0 and worst_unit <= 1e-9
    _verdict("criterion-6 interference transforms", ok,
             f"worst max|z|={worst_z:.2f} tol=3.0, worst |L(0)-1|="
             f"{worst_unit:.1e} tol=1e-9, n=10000 | " + "; ".join(rows))


# -- trajectory criteria -------------------------------------------------------------


@pytest.fixture(scope="module")
def route_batch(urban):
    """200 seeded realizations solved at lambda_p = 0.4 plus the same-seed
    terrestrial-only baseline solutions.  Realizations are drawn on the
    25x25 km^2 mission area (the interference horizon only matters for the
    SINR integrals, not for which BSs can serve a 5 km route)."""
    cfg = urban
    cfg0 = urban.replace(lambda_p_per_km=0.0)
    S, D = default_endpoints(cfg)
    area = Window(12.5)
    rows = []
    for i in range(N_ROUTE_REALIZATIONS):
        real = sample_realization(cfg, _rng_for(SEED_ROUTES, i), window=area)
        res = max_min_sinr(real, S, D, cfg)
        real0 = sample_realization(cfg0, _rng_for(SEED_ROUTES, i), window=area)
        res0 = max_min_sinr(real0, S, D, cfg0)
        rows.append((real, res, res0))
    return cfg, cfg0, S, D, rows


def test_c07_max_min_floor_bracket_and_gain(route_batch):
    """On every one of the 200 instances: the returned floor is feasible,
    the floor plus twice the tolerance is not, and the probe trace cleanly
    separates feasible from infeasible; the mean floor strictly exceeds the
    same-seed terrestrial-only baseline."""
    cfg, cfg0, S, D, rows = route_batch
    n_feas = n_infeas = n_trace = 0
    g_with, g_without = [], []
    for real, res, res0 in rows:
        if build_bs_graph(real, res.gamma_star, S, D, cfg).connected():
            n_feas += 1
        bumped = 10.0 ** ((res.gamma_star_db + 2.0 * cfg.eps_db) / 10.0)
        if not build_bs_graph(real, bumped, S, D, cfg).connected():
            n_infeas += 1
        feas = [g for g, ok in res.trace if ok]
        infeas = [g for g, ok in res.trace if not ok]
        if (max(feas) == res.gamma_star_db
                and (not infeas or max(feas) < min(infeas))):
            n_trace += 1
        g_with.append(res.gamma_star_db)
        g_without.append(res0.gamma_star_db)
    mean_with = float(np.mean(g_with))
    mean_without = float(np.mean(g_without))
    n = len(rows)
    ok = (n_feas == n and n_infeas == n and n_trace == n
          and mean_with > mean_without)
    _verdict("criterion-7 max-min floor search", ok,
             f"feasible-at-floor {n_feas}/{n}, infeasible-at-floor+2eps"
             f" {n_infeas}/{n}, clean traces {n_trace}/{n}, mean floor"
             f" {mean_with:+.2f} dB vs baseline {mean_without:+.2f} dB")


def test_c08_trajectory_covered_and_tight(route_batch):
    """On the same instances the planned polyline stays inside the disk
    union (1 m sampling), travel time is at least the straight-line time
    with equality whenever the straight segment is covered, and the length
    never exceeds the discretized boundary-walk baseline."""
    cfg, _, S, D, rows = route_batch
    t_straight = math.hypot(D[0] - S[0], D[1] - S[1]) / cfg.v_mps
    n = len(rows)
    n_inside = n_floor = n_equal = n_beats = straight_cases = 0
    worst_violation = 0.0
    for real, res, _ in rows:
        sol = min_time_trajectory(res.gamma_star, res.sequence, S, D,
                                  cfg.v_mps, cfg)
        base = boundary_baseline(res.gamma_star, res.sequence, S, D,
                                 cfg.v_mps, cfg)
        centers = np.array([[b.x, b.y] for b in sol.bs_sequence])
        radii = np.array([res.radii[b.kind] for b in sol.bs_sequence])
        pts = []
        wp = sol.waypoints
        for a, b in zip(wp[:-1], wp[1:]):
            steps = max(int(math.ceil(math.hypot(*(b - a)))), 1)
            t = np.linspace(0.0, 1.0, steps + 1)[:, None]
            pts.append(a + t * (b - a))
        pts = np.vstack(pts)
        gap = np.hypot(pts[:, 0, None] - centers[None, :, 0],
                       pts[:, 1, None] - centers[None, :, 1]) - radii
        slack = float(np.max(np.min(gap, axis=1)))
        worst_violation = max(worst_violation, slack)
        if slack <= 1e-6:
            n_inside += 1
        if sol.t_min >= t_straight - 1e-9:
            n_floor += 1
        chain = CircleChain(centers, radii)
        if segment_covered(S, D, chain):
            straight_cases += 1
            if math.isclose(sol.t_min, t_straight,
                            rel_tol=1e-12, abs_tol=1e-9):
                n_equal += 1
        if sol.total_length <= base.total_length + 1e-6:
            n_beats += 1
    ok = (n_inside == n and n_floor == n and n_equal == straight_cases
          and n_beats == n)
    _verdict("criterion-8 minimal-time trajectories", ok,
             f"inside-union {n_inside}/{n} (worst overshoot"
             f" {worst_violation:.2e} m), >=straight-time {n_floor}/{n},"
             f" equality on covered straight {n_equal}/{straight_cases},"
             f" <=boundary-baseline {n_beats}/{n}")


def test_c09_travel_time_shape_report(urban):
    """Soft criterion, reported not gated: mean minimal travel time versus
    dedicated-BS density over 200 realizations per grid point (12 km
    sampling window around the 5 km corridor)."""
    S, D = default_endpoints(urban)
    window = Window(6.0)
    t_straight = math.hypot(D[0] - S[0], D[1] - S[1]) / urban.v_mps
    grid = (0.05, 0.4, 1.2)
    means, errs = [], []
    for lam_p in grid:
        cfg = urban.replace(lambda_p_per_km=lam_p)
        ts = []
        for i in range(N_ROUTE_REALIZATIONS):
            real = sample_realization(cfg, _rng_for(SEED_SHAPE, i),
                                      window=window)
            res = max_min_sinr(real, S, D, cfg)
            sol = min_time_trajectory(res.gamma_star, res.sequence, S, D,
                                      cfg.v_mps, cfg)
            ts.append(sol.t_min)
        means.append(float(np.mean(ts)))
        errs.append(float(np.std(ts) / math.sqrt(len(ts))))
    if means[0] < means[1] > means[2]:
        shape = "rise-then-fall"
    elif means[0] > means[1] < means[2]:
        shape = "fall-then-rise"
    else:
        shape = "monotone"
    detail = ", ".join(
        f"lam_p={g:g}: {m:.1f}+/-{e:.1f}s"
        for g, m, e in zip(grid, means, errs))
    _report("criterion-9 mean travel time vs density (soft)",
            f"{detail}; straight-line floor {t_straight:.1f}s;"
            f" observed shape: {shape}")


# -- secondary package ---------------------------------------------------------------


def test_c10_frontend_builds_and_renders():
    """The plotting package builds and its own test suite (three figure
    kinds render; trajectory waypoints sit inside the drawn disks in pixel
    space) passes."""
    front = ROOT / "frontend"
    if not (front / "package.json").exists():
        pytest.skip("frontend package not present in this checkout")
    proc = subprocess.run(["npm", "test", "--silent"], cwd=front,
                          capture_output=True, text=True, timeout=600)
    tail = (proc.stdout + proc.stderr).strip().splitlines()[-6:]
    ok = proc.returncode == 0
    _verdict("criterion-10 figure rendering suite", ok,
             f"npm test exit={proc.returncode} | " + " / ".join(tail))
