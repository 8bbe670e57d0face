"""Shared pytest fixtures."""

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(ROOT / "src"))

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def golden_dir() -> Path:
    return GOLDEN


@pytest.fixture
def three_countries_path() -> Path:
    return FIXTURES / "three_countries.json"


@pytest.fixture
def config_file(tmp_path):
    """Write a YAML config under tmp_path and return a factory for its path."""

    def write(text: str = "") -> Path:
        path = tmp_path / "config.yaml"
        path.write_text(
            "logging:\n"
            f"  file: {tmp_path / 'logs' / 'test.log'}\n"
            "  console: false\n" + text,
            encoding="utf-8",
        )
        return path

    return write


@pytest.fixture
def config(config_file):
    from config.config_manager import ConfigManager
    return ConfigManager(str(config_file()), environ={})
