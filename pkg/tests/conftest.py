import numpy as np
import pytest

from jumpsqueeze.config import load_config


@pytest.fixture(scope="session")
def config():
    return load_config()


@pytest.fixture(scope="session")
def trap(config):
    return config.trap


@pytest.fixture(scope="session")
def rabi(config):
    return config.rabi


def distribution_tvd(p, q):
    """Total-variation distance between two number distributions,
    zero-padded to a common length."""
    n = max(len(p), len(q))
    a = np.zeros(n)
    b = np.zeros(n)
    a[:len(p)] = p
    b[:len(q)] = q
    return 0.5 * float(np.abs(a - b).sum())
