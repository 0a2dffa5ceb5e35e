"""Command-line entry point: experiment orchestration and result files.

Four subcommands share one flag vocabulary (--config --seed --iters --out
--sweep KEY=v1,v2,...):

- coverage-sweep   analytic + Monte Carlo coverage along one config axis (CSV)
- maxmin-sweep     per-cell mean max-min SINR and travel time (CSV)
- trajectory-demo  one seeded realization solved end to end (JSON)
- validate         reduced-budget oracle suite; nonzero exit on failure

Every output embeds the config hash, seed, and tool version, and a rerun
with the same flags is byte-identical.  Exit codes: 0 ok, 1 validation
failure, 2 config error, 3 numerics error.
"""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .channel import BsKind, LinkKind
from .config import NetworkConfig, load_config
from .coverage import coverage_probability
from .distlaw import nearest_cdf
from .errors import AerialcovError, ConfigError, NoRouteError, ValidationError
from .geometry import Window, sample_realization
from .interference import (LaplaceContext, laplace_general,
                           laplace_typical)
from .montecarlo import (_interference_draw, _rng_for, empirical_distance_cdf,
                         estimate_coverage, estimate_laplace)
from .trajectory import (CircleChain, default_endpoints, max_min_sinr,
                         min_time_trajectory, segment_covered)

_COMMANDS = ("coverage-sweep", "maxmin-sweep", "trajectory-demo", "validate")

# UAV travel area (25x25 km^2).  Trajectory commands sample base stations on
# this window: stations beyond it cannot serve a route across the central
# mission segment, while the interference horizon still enters every SINR
# integral through the config's truncation radius.
_MISSION_WINDOW = Window(12.5)


@dataclass(frozen=True)
class ExperimentSpec:
    """One CLI invocation, resolved and validated."""

    command: str
    config: NetworkConfig
    sweeps: tuple[tuple[str, tuple[float, ...]], ...]
    seed: int
    iterations: int
    out: str | None

    def __post_init__(self):
        if self.command not in _COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        for key, grid in self.sweeps:
            if not grid:
                raise ConfigError(f"sweep grid for {key!r} is empty")


def config_hash(cfg: NetworkConfig) -> str:
    """Stable short digest of every config field."""
    text = "\n".join(
        f"{f.name}={getattr(cfg, f.name)!r}"
        for f in sorted(dataclasses.fields(cfg), key=lambda f: f.name)
    )
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _fmt(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return format(x, ".10g")


def _header(spec: ExperimentSpec) -> list[str]:
    lines = [
        f"# config_hash={config_hash(spec.config)}",
        f"# seed={spec.seed}",
        f"# tool_version={__version__}",
    ]
    for key, grid in spec.sweeps:
        lines.append(f"# sweep_key={key}")
    return lines


def _sweep_cfg(base: NetworkConfig, assignment: dict[str, float]) -> NetworkConfig:
    known = {f.name for f in dataclasses.fields(base)}
    for key in assignment:
        if key not in known:
            raise ConfigError(f"unknown config key {key!r} in --sweep")
    return base.replace(**assignment)


def _cell_rng(seed: int, cell: int, index: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(cell, index)))


# -- coverage-sweep ----------------------------------------------------------------


def run_coverage_sweep(spec: ExperimentSpec) -> str:
    """CSV of analytic vs Monte Carlo coverage along one swept config key.

    The same seed feeds every grid point (common random numbers), so curves
    vary only through the swept parameter."""
    if len(spec.sweeps) != 1:
        raise ConfigError("coverage-sweep needs exactly one --sweep axis")
    key, grid = spec.sweeps[0]
    tau = spec.config.tau
    rows = []
    for value in grid:
        cfg = _sweep_cfg(spec.config, {key: value})
        ana = coverage_probability(tau, cfg)
        mc = estimate_coverage(cfg, tau, spec.iterations, spec.seed)
        rows.append([value, ana.total, mc.p_hat, mc.ci_lo, mc.ci_hi,
                     ana.p_tb_l, ana.p_tb_n, ana.p_db_l, ana.p_db_n])
    lines = _header(spec)
    lines.append(f"{key},analytic_p_cov,mc_p_cov,mc_ci_lo,mc_ci_hi,"
                 "p_tb_l,p_tb_n,p_db_l,p_db_n")
    lines += [",".join(_fmt(x) for x in row) for row in rows]
    return "\n".join(lines) + "\n"


# -- maxmin-sweep ------------------------------------------------------------------


def run_maxmin_sweep(spec: ExperimentSpec) -> str:
    """CSV of mean max-min SINR and mean minimal travel time per sweep cell.

    Cells are the cross product of up to two swept keys.  Each cell attempts
    `iterations` independent realizations; ones with no coverage route at
    the search floor count into the success rate and are excluded from the
    means (nan when every attempt failed)."""
    if not 1 <= len(spec.sweeps) <= 2:
        raise ConfigError("maxmin-sweep needs one or two --sweep axes")
    axes = spec.sweeps
    cells = [{}]
    for key, grid in axes:
        cells = [dict(c, **{key: v}) for c in cells for v in grid]
    rows = []
    for cell_idx, assignment in enumerate(cells):
        cfg = _sweep_cfg(spec.config, assignment)
        S, D = default_endpoints(cfg)
        gamma_db, t_min = [], []
        for i in range(spec.iterations):
            rng = _cell_rng(spec.seed, cell_idx, i)
            realization = sample_realization(cfg, rng, window=_MISSION_WINDOW)
            try:
                found = max_min_sinr(realization, S, D, cfg)
            except NoRouteError:
                continue
            sol = min_time_trajectory(found.gamma_star, found.sequence,
                                      S, D, cfg.v_mps, cfg)
            gamma_db.append(found.gamma_star_db)
            t_min.append(sol.t_min)
        n_ok = len(gamma_db)
        rows.append(
            [assignment[k] for k, _ in axes]
            + [float(np.mean(gamma_db)) if n_ok else math.nan,
               float(np.mean(t_min)) if n_ok else math.nan,
               n_ok / spec.iterations, spec.iterations])
    lines = _header(spec)
    lines.append(",".join([k for k, _ in axes]
                          + ["mean_gamma_star_db", "mean_t_min_s",
                             "success_rate", "n_realizations"]))
    lines += [",".join(_fmt(x) for x in row) for row in rows]
    return "\n".join(lines) + "\n"


# -- trajectory-demo ---------------------------------------------------------------


def run_trajectory_demo(spec: ExperimentSpec) -> str:
    """JSON of one seeded realization solved end to end: network geometry,
    the max-min floor and its BS chain, disk radii, and the trajectory."""
    if spec.sweeps:
        raise ConfigError("trajectory-demo takes no --sweep axis")
    cfg = spec.config
    rng = _cell_rng(spec.seed, 0, 0)
    realization = sample_realization(cfg, rng, window=_MISSION_WINDOW)
    S, D = default_endpoints(cfg)
    found = max_min_sinr(realization, S, D, cfg)
    sol = min_time_trajectory(found.gamma_star, found.sequence,
                              S, D, cfg.v_mps, cfg)
    doc = {
        "meta": {
            "config_hash": config_hash(cfg),
            "seed": spec.seed,
            "tool_version": __version__,
        },
        "window_half_side_km": realization.window.half_side,
        "S_m": [float(S[0]), float(S[1])],
        "D_m": [float(D[0]), float(D[1])],
        "v_mps": cfg.v_mps,
        "gamma_star_db": found.gamma_star_db,
        "radii_m": {
            "tbs": found.radii[BsKind.Tbs],
            "dedicated": found.radii[BsKind.Dedicated],
        },
        "tbs_m": (np.asarray(realization.tbs) * 1000.0).tolist(),
        "dedicated_m": (np.asarray(realization.dedicated) * 1000.0).tolist(),
        "roads": [
            {"rho_km": line.rho, "phi_rad": line.phi}
            for line, _ in realization.roads
        ],
        "bs_sequence": [
            {"kind": "dedicated" if n.kind is BsKind.Dedicated else "tbs",
             "x_m": n.x, "y_m": n.y,
             "radius_m": found.radii[n.kind]}
            for n in found.sequence
        ],
        "waypoints_m": sol.waypoints.tolist(),
        "t_min_s": sol.t_min,
        "total_length_m": sol.total_length,
    }
    return json.dumps(doc, indent=2) + "\n"


# -- validate ----------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def _check_distance_cdfs(cfg: NetworkConfig, iterations: int,
                         seed: int) -> list[CheckResult]:
    # KS distance scales ~ 1/sqrt(N): 0.01 is the full-budget (1e5) figure
    tol = 0.01 * math.sqrt(max(1e5 / iterations, 1.0))
    out = []
    for bs in (BsKind.Tbs, BsKind.Dedicated):
        for link in (LinkKind.LoS, LinkKind.NLoS):
            emp = empirical_distance_cdf((bs, link), cfg, iterations, seed)
            r = emp.distances_m
            model = nearest_cdf((bs, link), r, cfg)
            ks = float(np.max(np.abs(emp.evaluate(r) - model)))
            out.append(CheckResult(
                f"distance-cdf-ks {bs.name.lower()}-{link.name.lower()}",
                ks <= tol, f"ks={ks:.5f} tol={tol:.5f} n={iterations}"))
    return out


def _check_laplace(cfg: NetworkConfig, iterations: int,
                   seed: int) -> list[CheckResult]:
    configs = [
        (BsKind.Tbs, LinkKind.LoS, 200.0, None),
        (BsKind.Dedicated, LinkKind.LoS, 300.0, math.pi / 4),
        (BsKind.Dedicated, LinkKind.NLoS, 500.0, math.pi / 3),
    ]
    out = []
    for bs, link, d, theta in configs:
        ctx = LaplaceContext(bs, link, d, theta, cfg)
        components = [("general", laplace_general)]
        if bs is BsKind.Dedicated:
            components.append(("typical", laplace_typical))
        for which, transform in components:
            # anchor the s grid at this component's mean interference power
            # so the transform is probed where it is informative, not at
            # 1-eps or 0+eps
            mean_i = np.mean([
                _interference_draw(ctx, _rng_for(seed, i), which)
                for i in range(min(iterations, 400))
            ])
            s = np.array([0.3, 1.0, 3.0]) / max(float(mean_i), 1e-30)
            mc = estimate_laplace(s, ctx, iterations, seed, which=which)
            ana = np.array([transform(float(si), ctx) for si in s])
            z = np.abs(ana - mc.mean) / np.maximum(mc.std_err, 1e-12)
            worst = float(np.max(z))
            # the pass line is the max of a dozen-plus t-statistics across
            # the serving configs; 4.0 keeps the healthy-run alarm rate near
            # 0.1% at small budgets, while a real transform defect lands far
            # beyond it
            out.append(CheckResult(
                f"laplace-mc {bs.name.lower()}-{link.name.lower()}"
                f"-d{d:g}-{which}",
                worst <= 4.0, f"max|z|={worst:.2f} tol=4.0 n={iterations}"))
    return out


def _check_coverage(cfg: NetworkConfig, iterations: int,
                    seed: int) -> list[CheckResult]:
    out = []
    for lam_p in (0.0, 0.4):
        c = _sweep_cfg(cfg, {"lambda_p_per_km": lam_p})
        ana = coverage_probability(c.tau, c)
        mc = estimate_coverage(c, c.tau, iterations, seed)
        halfwidth = 0.5 * (mc.ci_hi - mc.ci_lo)
        tol = 0.015 + 3.0 * halfwidth / 1.96
        diff = abs(ana.total - mc.p_hat)
        out.append(CheckResult(
            f"coverage-mc lambda_p={lam_p:g}",
            diff <= tol,
            f"analytic={ana.total:.4f} mc={mc.p_hat:.4f} "
            f"|diff|={diff:.4f} tol={tol:.4f} n={iterations}"))
    return out


def _check_segment_cover(seed: int, instances: int = 60) -> list[CheckResult]:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(77,)))
    bad = 0
    unresolvable = 0
    for _ in range(instances):
        k = int(rng.integers(2, 6))
        centers = np.cumsum(rng.uniform(-600.0, 900.0, size=(k, 2)), axis=0)
        radii = rng.uniform(300.0, 900.0, size=k)
        chain = CircleChain(centers, radii, validate=False)
        p = centers[0] + rng.uniform(-1.0, 1.0, 2) * radii[0] * 0.7
        q = centers[-1] + rng.uniform(-1.0, 1.0, 2) * radii[-1] * 0.7
        exact = segment_covered(p, q, chain)
        n = max(int(np.hypot(*(q - p))), 2)
        t = np.linspace(0.0, 1.0, n + 1)
        pts = p[None, :] + t[:, None] * (q - p)[None, :]
        dist = np.hypot(pts[:, None, 0] - centers[None, :, 0],
                        pts[:, None, 1] - centers[None, :, 1])
        margin = np.min(dist - radii[None, :], axis=1)
        if exact and np.any(margin > 1e-6):
            bad += 1  # claims covered but a sample sits outside
        elif not exact and np.all(margin < -0.5):
            # every 1 m sample is half a meter inside, yet "not covered":
            # any real gap this wide would have been sampled
            bad += 1
        elif not exact and not np.any(margin > 1e-6):
            unresolvable += 1  # gap narrower than the sampling step
    return [CheckResult(
        "segment-cover-sampling", bad == 0,
        f"instances={instances} disagreements={bad} "
        f"subresolution_gaps={unresolvable}")]


def run_validate(spec: ExperimentSpec) -> tuple[str, bool]:
    """Reduced-budget oracle suite; tolerances widen with fewer iterations
    and are printed alongside each verdict."""
    cfg = spec.config
    checks: list[CheckResult] = []
    checks += _check_distance_cdfs(cfg, spec.iterations, spec.seed)
    checks += _check_laplace(cfg, max(spec.iterations // 10, 400), spec.seed)
    checks += _check_coverage(cfg, spec.iterations, spec.seed)
    checks += _check_segment_cover(spec.seed)
    ok = all(c.passed for c in checks)
    lines = _header(spec)
    lines.append(f"# iterations={spec.iterations}")
    lines += [c.line() for c in checks]
    lines.append(f"validate: {'ok' if ok else 'FAILED'} "
                 f"({sum(c.passed for c in checks)}/{len(checks)} checks)")
    return "\n".join(lines) + "\n", ok


# -- argument plumbing -------------------------------------------------------------


def _parse_sweep(text: str) -> tuple[str, tuple[float, ...]]:
    key, sep, values = text.partition("=")
    if not sep or not key:
        raise ConfigError(f"--sweep expects KEY=v1,v2,... (got {text!r})")
    try:
        grid = tuple(float(v) for v in values.split(",") if v != "")
    except ValueError as exc:
        raise ConfigError(f"--sweep {key}: non-numeric grid value") from exc
    if not grid:
        raise ConfigError(f"--sweep {key}: empty grid")
    return key, grid


_DEFAULT_ITERS = {
    "coverage-sweep": 10_000,
    "maxmin-sweep": 50,
    "trajectory-demo": 1,
    "validate": 10_000,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aerialcov",
        description="Coverage analysis and UAV route planning for hybrid "
                    "terrestrial / road-deployed networks.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="config file path")
        p.add_argument("--seed", type=int, default=0, help="base RNG seed")
        p.add_argument("--iters", type=int, default=None,
                       help="Monte Carlo iterations / realizations per cell")
        p.add_argument("--out", default=None, help="output file path")
        p.add_argument("--sweep", action="append", default=[],
                       metavar="KEY=v1,v2,...",
                       help="swept config key and its grid (repeatable)")
    return parser


def _spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    cfg = load_config(args.config)
    iters = args.iters if args.iters is not None else _DEFAULT_ITERS[args.command]
    sweeps = tuple(_parse_sweep(s) for s in args.sweep)
    if args.seed < 0 or args.seed >= 2 ** 64:
        raise ConfigError("--seed must fit in 64 bits")
    return ExperimentSpec(command=args.command, config=cfg, sweeps=sweeps,
                          seed=args.seed, iterations=iters, out=args.out)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = _spec_from_args(args)
        if spec.command == "coverage-sweep":
            _emit(run_coverage_sweep(spec), spec.out)
        elif spec.command == "maxmin-sweep":
            _emit(run_maxmin_sweep(spec), spec.out)
        elif spec.command == "trajectory-demo":
            _emit(run_trajectory_demo(spec), spec.out)
        else:
            report, ok = run_validate(spec)
            _emit(report, spec.out)
            if spec.out is not None:
                sys.stdout.write(report)
            if not ok:
                raise ValidationError("oracle suite failed")
    except AerialcovError as exc:
        if not isinstance(exc, ValidationError):
            print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
