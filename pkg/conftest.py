"""
Shared pytest fixtures.
"""

import sys
from pathlib import Path

import pytest
import yaml

ROOT = Path(__file__).resolve().parent
sys.path.insert(0, str(ROOT / "src"))

from cli.config import RunConfig, parse_config  # noqa: E402
from spectral.basis import DomainSpec, EigenBasis  # noqa: E402

RUNS_DIR = ROOT / "config" / "runs"

# Sections updated key by key; any other section is replaced whole
MERGED_SECTIONS = ('domain', 'params', 'time', 'output', 'monitor')


@pytest.fixture
def runs_dir() -> Path:
    return RUNS_DIR


@pytest.fixture
def interval_basis():
    """Factory for n-mode bases on (0, pi)."""
    def build(n: int = 1):
        return EigenBasis.eigenpairs(DomainSpec.unit_box(1), n)
    return build


@pytest.fixture
def make_config(tmp_path):
    """
    Factory for validated run configurations.

    Sections override a small 1D linear default; output goes to tmp_path.
    """
    def build(**sections) -> RunConfig:
        data = {
            'domain': {'dim': 1, 'n_modes': 1},
            'params': {'tau': 1.0, 'c': 1.0, 'k': 0.0},
            'init': {'modes': [{'mode': 1, 'values': [1.0, 0.0, -1.0]}]},
            'time': {'dt': 0.01, 't_end': 1.0, 'output_stride': 1},
            'output': {'directory': str(tmp_path), 'name': 'fixture'},
        }
        for key, value in sections.items():
            if key in MERGED_SECTIONS and isinstance(value, dict):
                data[key] = {**data.get(key, {}), **value}
            else:
                data[key] = value
        return parse_config(yaml.safe_dump(data))
    return build
