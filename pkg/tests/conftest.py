"""Shared fixtures: seeded generators and synthetic flow states."""
import numpy as np
import pytest

from layer_0 import FlowState


def random_state(rng: np.random.Generator, shape=(16, 16, 16), dx: float = 1.0) -> FlowState:
    """Positive density in [1, 2) and standard-normal velocity."""
    return FlowState.from_arrays(1.0 + rng.random(shape), *rng.standard_normal((3,) + tuple(shape)), dx=dx)


def taylor_green(n: int = 64, amp: float = 1.0) -> FlowState:
    """Periodic Taylor–Green vortex with a weak density modulation."""
    x = (np.arange(n) + 0.5) * 2 * np.pi / n
    X, Y, Z = np.meshgrid(x, x, x, indexing="ij")
    return FlowState.from_arrays(
        1.0 + 0.1 * np.cos(2 * X) * np.cos(2 * Y),
        amp * np.sin(X) * np.cos(Y) * np.cos(Z),
        -amp * np.cos(X) * np.sin(Y) * np.cos(Z),
        0.1 * amp * np.sin(2 * Z) * np.cos(X),
        dx=2 * np.pi / n,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def make_state(rng):
    def _make(shape=(16, 16, 16), dx: float = 1.0) -> FlowState:
        return random_state(rng, shape, dx)

    return _make


@pytest.fixture
def seeded_states():
    """Independent random states drawn from generators seeded 0, 1, 2, ..."""
    def _make(count: int, shape=(16, 16, 16)):
        for seed in range(count):
            yield random_state(np.random.default_rng(seed), shape)

    return _make


@pytest.fixture(scope="session")
def tg64():
    return taylor_green(64)


@pytest.fixture(scope="session")
def tg128():
    return taylor_green(128)
