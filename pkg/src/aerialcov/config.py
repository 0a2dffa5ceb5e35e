"""Parameter loading: key=value config files, validation, unit conversion.

All dB->linear and km->m conversions happen here, once.  Downstream analytic
code works in meters and linear units exclusively; the geometry samplers keep
the km-based API their callers expect.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, fields
from functools import cached_property

import numpy as np

from .errors import ConfigError

# Keys a config file must provide (network model, Table-style units).
REQUIRED_KEYS = (
    "lambda_tb_per_km2",
    "lambda_l_km_per_km2",
    "lambda_p_per_km",
    "h_tb_m",
    "h_db_m",
    "h_u_m",
    "rho_tb_w",
    "rho_db_w",
    "g_m_db",
    "g_s_db",
    "z_db_m",
    "L_km",
    "v_mps",
    "tau_db",
    "a",
    "b",
    "sigma2_w",
    "alpha_n",
    "alpha_l",
    "m_n",
    "m_l",
    "eta_n_db",
    "eta_l_db",
)

# Numerics keys are optional and carry defaults.
NUMERICS_KEYS = (
    "rel_tol",
    "abs_tol",
    "max_depth",
    "truncation_radius_km",
    "theta_nodes",
    "eps_db",
    "gamma_floor_db",
)

_INT_KEYS = {"m_n", "m_l", "max_depth", "theta_nodes"}


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


@dataclass(frozen=True)
class NetworkConfig:
    lambda_tb_per_km2: float
    lambda_l_km_per_km2: float
    lambda_p_per_km: float
    h_tb_m: float
    h_db_m: float
    h_u_m: float
    rho_tb_w: float
    rho_db_w: float
    g_m_db: float
    g_s_db: float
    z_db_m: float
    L_km: float
    v_mps: float
    tau_db: float
    a: float
    b: float
    sigma2_w: float
    alpha_n: float
    alpha_l: float
    m_n: int
    m_l: int
    eta_n_db: float
    eta_l_db: float
    rel_tol: float = 1e-6
    abs_tol: float = 1e-12
    max_depth: int = 30
    truncation_radius_km: float = 30.0
    theta_nodes: int = 16
    eps_db: float = 0.1
    gamma_floor_db: float = -40.0

    def __post_init__(self):
        _validate(self)

    # --- linear / meter-based accessors -----------------------------------
    @property
    def g_m(self):
        return float(db_to_linear(self.g_m_db))

    @property
    def g_s(self):
        return float(db_to_linear(self.g_s_db))

    @property
    def eta_l(self):
        return float(db_to_linear(self.eta_l_db))

    @property
    def eta_n(self):
        return float(db_to_linear(self.eta_n_db))

    @property
    def tau(self):
        return float(db_to_linear(self.tau_db))

    @property
    def gamma_floor(self):
        return float(db_to_linear(self.gamma_floor_db))

    @property
    def dh1_m(self):
        """Height of the UAV above dedicated BSs."""
        return self.h_u_m - self.h_db_m

    @property
    def dh2_m(self):
        """Height of the UAV above terrestrial BSs."""
        return self.h_u_m - self.h_tb_m

    @property
    def lam_tb(self):
        """TBS density per m^2."""
        return self.lambda_tb_per_km2 * 1e-6

    @property
    def lam_l(self):
        """Line-process intensity per m."""
        return self.lambda_l_km_per_km2 * 1e-3

    @property
    def lam_p(self):
        """On-line point density per m."""
        return self.lambda_p_per_km * 1e-3

    @property
    def r_max_m(self):
        return self.truncation_radius_km * 1e3

    @property
    def window_half_side_km(self):
        return max(12.5, self.truncation_radius_km)

    @cached_property
    def pv(self):
        """Parameter vector consumed by the numeric kernels (meters, linear)."""
        from . import _kernels as k

        v = np.zeros(k.PV_LEN)
        v[k.PV_LAM_TB] = self.lam_tb
        v[k.PV_LAM_L] = self.lam_l
        v[k.PV_LAM_P] = self.lam_p
        v[k.PV_DH1] = self.dh1_m
        v[k.PV_DH2] = self.dh2_m
        v[k.PV_A] = self.a
        v[k.PV_B] = self.b
        v[k.PV_G_M] = self.g_m
        v[k.PV_G_S] = self.g_s
        v[k.PV_Z_DB] = self.z_db_m
        v[k.PV_RHO_TB] = self.rho_tb_w
        v[k.PV_RHO_DB] = self.rho_db_w
        v[k.PV_ETA_L] = self.eta_l
        v[k.PV_ETA_N] = self.eta_n
        v[k.PV_ALPHA_L] = self.alpha_l
        v[k.PV_ALPHA_N] = self.alpha_n
        v[k.PV_M_L] = float(self.m_l)
        v[k.PV_M_N] = float(self.m_n)
        v[k.PV_SIGMA2] = self.sigma2_w
        v[k.PV_R_MAX] = self.r_max_m
        v.flags.writeable = False
        return v

    def replace(self, **kw) -> "NetworkConfig":
        vals = {f.name: getattr(self, f.name) for f in fields(self)}
        vals.update(kw)
        return NetworkConfig(**vals)


def _validate(c: NetworkConfig):
    def bad(key, why):
        raise ConfigError(f"config key '{key}': {why}")

    for key in ("lambda_tb_per_km2", "lambda_l_km_per_km2", "lambda_p_per_km"):
        if getattr(c, key) < 0:
            bad(key, "density must be >= 0")
    for key in ("rho_tb_w", "rho_db_w", "v_mps", "L_km", "z_db_m", "a", "b"):
        if getattr(c, key) <= 0:
            bad(key, "must be > 0")
    if c.sigma2_w < 0:
        bad("sigma2_w", "must be >= 0")
    if c.h_u_m <= max(c.h_tb_m, c.h_db_m):
        bad("h_u_m", "UAV must fly above both BS types")
    if not (c.alpha_n >= c.alpha_l > 0):
        bad("alpha_n", "need alpha_n >= alpha_l > 0")
    if c.eta_n_db > c.eta_l_db:
        bad("eta_n_db", "NLoS extra loss cannot be milder than LoS")
    for key in ("m_n", "m_l"):
        m = getattr(c, key)
        if not isinstance(m, int) or m < 1:
            bad(key, "Nakagami shape must be an integer >= 1")
    if c.g_m_db < c.g_s_db:
        bad("g_m_db", "mainlobe gain below sidelobe gain")
    if db_to_linear(c.g_s_db) <= 0:
        bad("g_s_db", "sidelobe gain must be positive")
    for key in ("rel_tol", "abs_tol", "truncation_radius_km", "eps_db"):
        if getattr(c, key) <= 0:
            bad(key, "must be > 0")
    if c.max_depth < 1:
        bad("max_depth", "must be >= 1")
    if c.theta_nodes < 2:
        bad("theta_nodes", "need at least 2 quadrature nodes")


def parse_config_text(text: str) -> dict:
    """Parse `key = value` lines; '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        out[key] = val
    return out


def load_config(path) -> NetworkConfig:
    try:
        with open(path) as fh:
            raw = parse_config_text(fh.read())
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e

    known = set(REQUIRED_KEYS) | set(NUMERICS_KEYS)
    for key in raw:
        if key not in known:
            raise ConfigError(f"unknown config key '{key}'")
    missing = [k for k in REQUIRED_KEYS if k not in raw]
    if missing:
        raise ConfigError(f"missing config key '{missing[0]}'")

    vals = {}
    for key, sval in raw.items():
        try:
            x = float(sval)
        except ValueError:
            raise ConfigError(f"config key '{key}': not a number: {sval!r}")
        if key in _INT_KEYS:
            if x != int(x):
                raise ConfigError(f"config key '{key}': must be an integer")
            x = int(x)
        vals[key] = x
    return NetworkConfig(**vals)


def config_hash(cfg: NetworkConfig) -> str:
    items = sorted((f.name, repr(getattr(cfg, f.name))) for f in fields(cfg))
    blob = "\n".join(f"{k}={v}" for k, v in items).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def urban_defaults(**overrides) -> NetworkConfig:
    """The shipped urban parameter set (used widely by the test-suite)."""
    base = dict(
        lambda_tb_per_km2=1.0,
        lambda_l_km_per_km2=4.0 / math.pi,
        lambda_p_per_km=0.4,
        h_tb_m=30.0,
        h_db_m=10.0,
        h_u_m=100.0,
        rho_tb_w=1.0,
        rho_db_w=1.0,
        g_m_db=10.0,
        g_s_db=0.0,
        z_db_m=534.0,
        L_km=5.0,
        v_mps=18.0,
        tau_db=0.0,
        a=12.0,
        b=0.11,
        sigma2_w=1e-9,
        alpha_n=4.0,
        alpha_l=2.1,
        m_n=1,
        m_l=3,
        eta_n_db=-20.0,
        eta_l_db=0.0,
    )
    base.update(overrides)
    return NetworkConfig(**base)
