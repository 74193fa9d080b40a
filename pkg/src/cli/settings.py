"""
Runtime settings: config/settings.yaml plus the environment overrides
FJMGT_OUTPUT_DIR and FJMGT_WORKERS (optionally from a .env file).
"""

import os
from pathlib import Path
from typing import Dict, Optional

import yaml
from loguru import logger
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

DEFAULT_SETTINGS_PATH = "config/settings.yaml"


class EnvironmentOverrides(BaseSettings):
    """The only settings the environment may override."""
    model_config = SettingsConfigDict(env_prefix='FJMGT_', env_file='.env', extra='ignore')

    output_dir: Optional[str] = None
    workers: Optional[int] = Field(None, ge=1)


def load_settings(path: str = DEFAULT_SETTINGS_PATH) -> Dict:
    """
    settings.yaml merged with environment overrides.

    Keys: LOG_LEVEL, LOG_FILE, OUTPUT_DIR, WORKERS, TENSOR_CACHE_DIR.
    A missing file yields the built-in defaults.
    """
    settings = {
        'LOG_LEVEL': 'INFO',
        'LOG_FILE': 'logs/fjmgt.log',
        'OUTPUT_DIR': None,
        'WORKERS': None,
        'TENSOR_CACHE_DIR': None,
    }

    settings_path = Path(path)
    if settings_path.exists():
        with open(settings_path, 'r') as f:
            settings.update(yaml.safe_load(f) or {})
    else:
        logger.debug(f"No settings file at {path}, using defaults")

    overrides = EnvironmentOverrides()
    if overrides.output_dir is not None:
        settings['OUTPUT_DIR'] = overrides.output_dir
    if overrides.workers is not None:
        settings['WORKERS'] = overrides.workers

    if not settings['WORKERS']:
        settings['WORKERS'] = os.cpu_count() or 1
    return settings
