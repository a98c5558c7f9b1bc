import numpy as np
import pytest

from config import Config
from grid_model import make_grid


@pytest.fixture
def grid5():
    return make_grid(0.0, 5.0, 5)


@pytest.fixture
def grid8():
    return make_grid(0.0, 5.0, 8)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def random_state(rng):
    def make(n):
        psi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        return psi / np.linalg.norm(psi)
    return make


@pytest.fixture(autouse=True)
def no_redis(monkeypatch):
    """Tests never reach a real Redis; test_cache_service installs its own client"""
    import cache_service
    monkeypatch.setattr(Config, 'CACHE_ENABLED', False)
    monkeypatch.setattr(cache_service, '_cache', None)


def align_phase(a, b):
    """b rotated by the global phase that best matches a"""
    inner = np.vdot(b, a)
    if abs(inner) == 0:
        return b
    return b * (inner / abs(inner))


def assert_states_close(a, b, atol=1e-10):
    b = align_phase(a, b)
    assert np.max(np.abs(a - b)) < atol
