"""Point-process primitives in the km-based plane: PPP and Poisson-line-Cox
sampling over a square window, plus planar distance helpers.

Everything downstream of sampling works in meters; these samplers keep the
km-based parameterization their densities are quoted in.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LineRT:
    """A road in (rho, phi) form: points (x, y) with x cos(phi) + y sin(phi)
    = rho; phi in [0, pi)."""

    rho: float
    phi: float


@dataclass(frozen=True)
class Window:
    half_side: float  # km; the window is [-half_side, half_side]^2

    def __post_init__(self):
        if self.half_side <= 0:
            raise ValueError("window half_side must be > 0")

    @property
    def area(self):
        return (2.0 * self.half_side) ** 2

    @property
    def circumradius(self):
        return self.half_side * math.sqrt(2.0)


@dataclass(frozen=True)
class NetworkRealization:
    tbs: np.ndarray  # (n, 2) km
    roads: tuple  # of (LineRT, (k, 2) km array)
    window: Window

    @property
    def dedicated(self):
        """All dedicated-BS locations as one (m, 2) array."""
        pts = [p for _, p in self.roads if len(p)]
        if not pts:
            return np.zeros((0, 2))
        return np.concatenate(pts, axis=0)


def sample_ppp(density, window: Window, rng) -> np.ndarray:
    """Homogeneous PPP of the given intensity (per km^2) on the window."""
    if density < 0:
        raise ValueError("density must be >= 0")
    n = rng.poisson(density * window.area)
    return rng.uniform(-window.half_side, window.half_side, size=(n, 2))


def sample_plcp(line_density, point_density, window: Window, rng):
    """Poisson line process carrying 1-D PPPs: lines are drawn on the disk
    circumscribing the window (count ~ Poisson(2*pi*line_density*R), rho
    uniform, phi uniform on [0, pi)); each line carries points of intensity
    point_density on its chord; points outside the window are dropped."""
    if line_density < 0 or point_density < 0:
        raise ValueError("density must be >= 0")
    r_circ = window.circumradius
    n_lines = rng.poisson(2.0 * math.pi * line_density * r_circ)
    rho = rng.uniform(-r_circ, r_circ, size=n_lines)
    phi = rng.uniform(0.0, math.pi, size=n_lines)
    half_chord = np.sqrt(np.maximum(r_circ * r_circ - rho * rho, 0.0))
    k = rng.poisson(point_density * 2.0 * half_chord)
    t = rng.uniform(-1.0, 1.0, size=int(k.sum())) * np.repeat(half_chord, k)
    cos_phi, sin_phi = np.cos(phi), np.sin(phi)
    x = np.repeat(rho * cos_phi, k) - t * np.repeat(sin_phi, k)
    y = np.repeat(rho * sin_phi, k) + t * np.repeat(cos_phi, k)
    inside = (np.abs(x) <= window.half_side) & (np.abs(y) <= window.half_side)
    pts = np.column_stack([x[inside], y[inside]])
    per_line = np.bincount(
        np.repeat(np.arange(n_lines), k)[inside], minlength=n_lines)
    chunks = np.split(pts, np.cumsum(per_line)[:-1]) if n_lines else []
    return [
        (LineRT(float(r), float(p)), chunk)
        for r, p, chunk in zip(rho, phi, chunks)
    ]


def sample_realization(cfg, rng, window: Window | None = None) -> NetworkRealization:
    """One network draw at the configured densities."""
    if window is None:
        window = Window(cfg.window_half_side_km)
    tbs = sample_ppp(cfg.lambda_tb_per_km2, window, rng)
    roads = sample_plcp(cfg.lambda_l_km_per_km2, cfg.lambda_p_per_km, window, rng)
    return NetworkRealization(tbs=tbs, roads=tuple(roads), window=window)


def horizontal_distance(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.hypot(*(a - b))) if a.ndim == 1 else np.hypot(
        a[..., 0] - b[..., 0], a[..., 1] - b[..., 1]
    )


def point_line_distance(p, line: LineRT):
    p = np.asarray(p, dtype=float)
    return float(abs(p[0] * math.cos(line.phi) + p[1] * math.sin(line.phi) - line.rho))
