"""
Configuration module for the UMWE credit-cycle engine.
Profiles for interactive use, development and testing.
"""


class Config:
    """Base configuration with defaults."""

    # Tolerances deciding the symbolic cases of the model
    EPS_A = 1e-12       # |a - 1| at or below this is the bifurcation point
    EPS_POS = 1e-12     # |ln i0 - ln i_fix| at or below this is "at the fixed point"
    EPS_C = 1e-12       # |ln c| at or below this is the constant bifurcation case

    # Numeric guards
    RATE_UNDERFLOW_GUARD = 1e-300
    LOG_OVERFLOW_GUARD = 700.0

    # Scenario defaults
    RATE_FLOOR = 0.0123
    PHASE_MIN_LENGTH = 2

    # Output
    OUTPUT_PRECISION = 12
    MIN_PRECISION = 6
    MAX_PRECISION = 17

    # Sweeps
    SWEEP_WORKERS = 4

    # Logging
    LOG_LEVEL = 'INFO'
    LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class DevelopmentConfig(Config):
    """Development configuration."""
    LOG_LEVEL = 'DEBUG'


class TestingConfig(Config):
    """Testing configuration."""
    LOG_LEVEL = 'WARNING'
    # Keep sweeps in-process so failures surface with a plain traceback
    SWEEP_WORKERS = 1


# Configuration mapping
config = {
    'development': DevelopmentConfig,
    'testing': TestingConfig,
    'default': Config
}

_active = Config


def get_config(name=None):
    """Get configuration by profile name, or the active one when name is None."""
    if name is None:
        return _active
    return config.get(name, config['default'])


def use_config(name):
    """Make the named profile the active configuration and return it."""
    global _active
    _active = get_config(name)
    return _active
