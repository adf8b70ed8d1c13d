"""
stzero Configuration Module
============================
Centralized configuration for the command-line application.
"""

import os
from typing import Optional

from errors import ConfigError

# Base directory of the application
BASE_DIR = os.path.dirname(os.path.abspath(__file__))


class Config:
    """Base configuration class."""

    # Logging
    LOG_LEVEL = os.environ.get('STZERO_LOG_LEVEL', 'INFO').upper()
    LOG_FORMAT = '%(asctime)s %(levelname)s [%(name)s] %(message)s'

    # Data
    DATA_DIR = os.environ.get('STZERO_DATA_DIR', os.path.join(BASE_DIR, 'data'))

    # Gradient check
    GRAD_CHECK_STEP = 1e-6
    GRAD_CHECK_TOLERANCE = 1e-4

    @staticmethod
    def seed_override() -> Optional[int]:
        """Seed forced by STZERO_SEED, read at call time."""
        raw = os.environ.get('STZERO_SEED')
        if raw is None or raw.strip() == '':
            return None
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"STZERO_SEED must be an integer, got '{raw}'") from None


class DevelopmentConfig(Config):
    """Development configuration."""
    LOG_LEVEL = os.environ.get('STZERO_LOG_LEVEL', 'DEBUG').upper()


class TestingConfig(Config):
    """Testing configuration."""
    LOG_LEVEL = 'WARNING'


class ProductionConfig(Config):
    """Production configuration."""


# Configuration mapping
config_map = {
    'development': DevelopmentConfig,
    'testing': TestingConfig,
    'production': ProductionConfig,
    'default': ProductionConfig
}


def get_config():
    """Get configuration based on environment."""
    env = os.environ.get('STZERO_ENV', 'production')
    return config_map.get(env, config_map['default'])
