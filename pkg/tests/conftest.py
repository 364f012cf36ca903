import sys

import numpy as np
import pytest

from radiostripe import channel


def random_correlation(rng, shape, n):
    """Random Hermitian PD matrices with a spread of powers, shape ``shape + (n, n)``."""
    X = channel.complex_normal(rng, shape + (n, n + 1))
    R = X @ np.conj(np.swapaxes(X, -1, -2)) / (n + 1)
    scale = 10 ** rng.uniform(-1.5, 0.5, size=shape)
    return R * scale[..., None, None]


def random_realization(rng, K, L, N, tau_p=None, noise=0.1, power=1.0, tau_c=300):
    tau_p = K if tau_p is None else tau_p
    R = random_correlation(rng, (K, L), N)
    h = channel.sample_channels(R, rng)
    pilots = channel.assign_pilots(K, tau_p)
    powers = np.full(K, power)
    return channel.mmse_estimate(R, h, pilots, powers, tau_p, noise, tau_c, rng=rng)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small(rng):
    return random_realization(rng, 3, 3, 2, tau_p=2)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.REPORT:
        terminalreporter.write_line(line)
