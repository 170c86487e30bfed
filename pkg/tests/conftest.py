"""
Pytest configuration and fixtures for qequil tests.
"""

import json
from pathlib import Path

import numpy as np
import pytest

from qequil.config.manager import ConfigManager
from qequil.services import constructions


def pytest_configure(config):
    """Configure pytest with custom markers"""
    config.addinivalue_line("markers", "slow: runs semidefinite programs over many instances")
    config.addinivalue_line("markers", "integration: exercises the CLI end to end")


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    """Keep QEQUIL_* overrides from the developer's shell out of the tests."""
    for var in ("QEQUIL_SOLVER", "QEQUIL_SEED", "QEQUIL_LOG_LEVEL", "QEQUIL_LOG_FILE"):
        monkeypatch.delenv(var, raising=False)


@pytest.fixture
def rng():
    """Seeded generator so random instances are reproducible."""
    return np.random.default_rng(1234)


@pytest.fixture
def temp_home(tmp_path, monkeypatch):
    """Provide temporary home directory for tests to avoid modifying real user config."""
    temp_home_dir = tmp_path / "home"
    temp_home_dir.mkdir()
    monkeypatch.setenv("HOME", str(temp_home_dir))
    monkeypatch.setattr(ConfigManager, "DEFAULT_CONFIG_PATH", temp_home_dir / ".qequil" / "config.md")
    return temp_home_dir


@pytest.fixture
def traffic_light():
    return constructions.canonical("traffic_light")


@pytest.fixture
def battle_of_sexes():
    return constructions.canonical("battle_of_sexes")


@pytest.fixture
def write_json(tmp_path):
    """Write a JSON document under tmp_path and return its path."""

    def _write(name: str, data) -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return path

    return _write
