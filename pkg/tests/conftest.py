"""Shared fixtures: seeded generators and a random 1D state factory."""

import numpy as np
import pytest

from hymo.state1d import MomentState1D


def random_state_1d(M, rng):
    """Random valid state with coefficients scaled like rho theta^{a/2}."""
    rho = float(rng.uniform(0.2, 5.0))
    u = float(rng.uniform(-2.0, 2.0))
    theta = float(rng.uniform(0.2, 4.0))
    f = rho * theta ** (np.arange(3, M + 1) / 2.0) * rng.normal(0.0, 0.3, M - 2)
    return MomentState1D(M=M, rho=rho, u=u, theta=theta, f=f)


@pytest.fixture
def rng():
    return np.random.default_rng(2026)


@pytest.fixture
def make_state_1d():
    return random_state_1d
