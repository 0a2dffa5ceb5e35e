"""Shared fixtures: the two shipped parameter sets and a cheap variant."""
from pathlib import Path

import pytest

from aerialcov.config import load_config

ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def urban():
    return load_config(ROOT / "urban.cfg")


@pytest.fixture(scope="session")
def rural():
    return load_config(ROOT / "rural.cfg")


@pytest.fixture(scope="session")
def urban04(urban):
    """Urban parameters at the default dedicated-BS density 0.4 /km."""
    return urban.replace(lambda_p_per_km=0.4)
