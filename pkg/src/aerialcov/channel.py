"""Propagation model: LoS probability, the two-level dedicated-BS antenna
gain, mean received power, and Nakagami power fading."""
from __future__ import annotations

from enum import IntEnum

import numpy as np

from . import _kernels as _k


class LinkKind(IntEnum):
    LoS = _k.LOS
    NLoS = _k.NLOS


class BsKind(IntEnum):
    Tbs = _k.TB
    Dedicated = _k.DB


KINDS = tuple((bs, link) for bs in BsKind for link in LinkKind)


def los_probability(d, delta_h, params):
    """P(LoS) toward a transmitter delta_h below the receiver at horizontal
    distance d (meters); d=0 means looking straight down."""
    if delta_h <= 0:
        raise ValueError("delta_h must be > 0")
    d = np.asarray(d, dtype=float)
    angle = np.degrees(np.arctan2(delta_h, d))
    out = 1.0 / (1.0 + params.a * np.exp(-params.b * (angle - params.a)))
    return float(out) if out.ndim == 0 else out


def link_probability(d, bs, link, params):
    """Probability the link toward a BS of the given kind is in the given
    LoS/NLoS state."""
    dh = params.dh1_m if bs == BsKind.Dedicated else params.dh2_m
    p = los_probability(d, dh, params)
    return p if link == LinkKind.LoS else 1.0 - p


def antenna_gain(d, params):
    """Dedicated-BS gain seen at horizontal distance d; the boundary
    d == z_db falls on the sidelobe side."""
    d = np.asarray(d, dtype=float)
    out = np.where(d < params.z_db_m, params.g_m, params.g_s)
    return float(out) if out.ndim == 0 else out


def mean_received_power(d, bs, link, params):
    """Mean received power in W at horizontal distance d (fading averaged
    out)."""
    d = np.asarray(d, dtype=float)
    eta = params.eta_l if link == LinkKind.LoS else params.eta_n
    alpha = params.alpha_l if link == LinkKind.LoS else params.alpha_n
    if bs == BsKind.Tbs:
        amp = params.rho_tb_w * params.g_s * eta
        dh = params.dh2_m
        out = amp * (d * d + dh * dh) ** (-0.5 * alpha)
    else:
        amp = params.rho_db_w * eta
        dh = params.dh1_m
        out = amp * antenna_gain(d, params) * (d * d + dh * dh) ** (-0.5 * alpha)
    return float(out) if out.ndim == 0 else out


def sample_fading(m, rng, size=None):
    """Unit-mean Nakagami-m power fading: Gamma(m, 1/m)."""
    if m < 1:
        raise ValueError("Nakagami shape must be >= 1")
    return rng.gamma(shape=m, scale=1.0 / m, size=size)
