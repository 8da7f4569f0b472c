"""
Pytest configuration and fixtures for UMWE engine tests.
"""
import pytest

from config import use_config

# Select the testing profile before any engine module reads its defaults
use_config('testing')

from model import Params  # noqa: E402
from scenario import preset, run_scenario  # noqa: E402


@pytest.fixture(autouse=True)
def testing_config():
    """Keep every test on the testing profile."""
    cfg = use_config('testing')
    yield cfg
    use_config('testing')


@pytest.fixture
def cycle_params():
    """Parameters of the calm credit market the full cycle starts from."""
    return Params(alpha=1.0, beta=1.0, mu=0.499, nu=0.499, k=105.5, l=0.0096)


@pytest.fixture
def params_with():
    """Factory for parameters with a prescribed composite exponent and fixed point."""
    def build(a, i_fix=0.04):
        return Params.with_composite(a, i_fix)
    return build


@pytest.fixture
def bifurcation_params():
    """a = 1 exactly with k = l = 1, so c = 1."""
    return Params(alpha=1.0, beta=1.0, mu=0.5, nu=0.5, k=1.0, l=1.0)


@pytest.fixture(scope='session')
def full_cycle_trajectory():
    """The full-cycle preset run once per session."""
    use_config('testing')
    return run_scenario(preset('full_cycle'))
