import matplotlib
matplotlib.use("Agg")

import numpy as np
import pytest

import curvcert as cc


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260808)


@pytest.fixture(scope="session")
def hyp2():
    return cc.hyperbolic(2)


@pytest.fixture(scope="session")
def hyp3():
    return cc.hyperbolic(3)


@pytest.fixture(scope="session")
def ch1():
    return cc.complex_hyperbolic(1)


@pytest.fixture(scope="session")
def ch2():
    return cc.complex_hyperbolic(2)


@pytest.fixture(scope="session")
def eu3():
    return cc.euclidean(3)


@pytest.fixture(scope="session")
def warp3():
    return cc.standard_warped_quadratic(3)


def random_h_unit(space, x, rng, orthogonal_to=()):
    """Random h-unit vector at x, orthogonal to the given vectors."""
    G = cc.metric_at(space, x)
    for _ in range(20):
        v = rng.normal(size=space.dim)
        for b in orthogonal_to:
            v = v - (v @ G @ b) / (b @ G @ b) * b
        n = float(np.sqrt(max(0.0, v @ G @ v)))
        if n > 1e-8:
            return v / n
    raise AssertionError("could not draw a unit vector")
