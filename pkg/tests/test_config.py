"""Config ingestion: shipped parameter sets, unit conversion, validation."""
import math
from pathlib import Path

import pytest

from aerialcov.config import NetworkConfig, load_config, parse_config_text
from aerialcov.errors import ConfigError

ROOT = Path(__file__).resolve().parent.parent


def test_urban_values_verbatim(urban):
    assert urban.lambda_tb_per_km2 == 1.0
    assert urban.lambda_l_km_per_km2 == pytest.approx(4.0 / math.pi, rel=1e-12)
    assert urban.lambda_p_per_km == 0.4
    assert (urban.h_tb_m, urban.h_db_m, urban.h_u_m) == (30.0, 10.0, 100.0)
    assert (urban.rho_tb_w, urban.rho_db_w) == (1.0, 1.0)
    assert (urban.g_m_db, urban.g_s_db) == (10.0, 0.0)
    assert urban.z_db_m == 534.0
    assert (urban.L_km, urban.v_mps) == (5.0, 18.0)
    assert urban.tau_db == 0.0
    assert (urban.a, urban.b) == (12.0, 0.11)
    assert urban.sigma2_w == 1e-9
    assert (urban.alpha_n, urban.alpha_l) == (4.0, 2.1)
    assert (urban.m_n, urban.m_l) == (1, 3)
    assert (urban.eta_n_db, urban.eta_l_db) == (-20.0, 0.0)


def test_rural_values(rural):
    assert rural.a == 4.88
    assert rural.b == 0.43
    assert rural.eta_n_db == 0.0 and rural.eta_l_db == 0.0
    assert rural.lambda_tb_per_km2 == 0.1


def test_db_fields_convert_to_linear_at_the_boundary(urban):
    assert urban.g_s == 1.0  # 0 dB is the identity
    assert urban.g_m == pytest.approx(10.0, rel=1e-12)
    assert urban.eta_n == pytest.approx(0.01, rel=1e-12)
    assert urban.eta_l == 1.0
    assert urban.tau == 1.0


def test_derived_heights_and_horizon(urban):
    assert urban.dh1_m == 90.0  # UAV above dedicated BSs
    assert urban.dh2_m == 70.0  # UAV above terrestrial BSs
    assert urban.r_max_m == pytest.approx(30_000.0)
    assert urban.window_half_side_km >= urban.truncation_radius_km


def test_missing_key_error_names_the_key(tmp_path, urban):
    text = (tmp_path / "broken.cfg")
    lines = [
        f"{k} = {v}"
        for k, v in parse_config_text((ROOT / "urban.cfg").read_text()).items()
        if k != "alpha_l"
    ]
    text.write_text("\n".join(lines))
    with pytest.raises(ConfigError, match="alpha_l"):
        load_config(text)


def test_invalid_range_error_names_the_key(urban):
    with pytest.raises(ConfigError, match="h_u_m"):
        urban.replace(h_u_m=5.0)
    with pytest.raises(ConfigError, match="lambda_p_per_km"):
        urban.replace(lambda_p_per_km=-0.1)
    with pytest.raises(ConfigError, match="m_l"):
        urban.replace(m_l=0)


def test_duplicate_key_rejected():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config_text("a = 1\na = 2\n")


def test_replace_returns_new_validated_config(urban):
    c2 = urban.replace(lambda_p_per_km=1.5)
    assert c2.lambda_p_per_km == 1.5
    assert urban.lambda_p_per_km == 0.4
    assert isinstance(c2, NetworkConfig)


def test_zero_densities_allowed(urban):
    c = urban.replace(lambda_p_per_km=0.0, lambda_l_km_per_km2=0.0)
    assert c.lam_p == 0.0 and c.lam_l == 0.0
