import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def disk_points(rng, n, radius):
    r = radius * np.sqrt(rng.uniform(size=n))
    return r * np.exp(2j * np.pi * rng.uniform(size=n))


def finite_difference(f, z, h=1e-6):
    """Central difference along the real axis (f analytic, so direction is irrelevant)."""
    return (f(z + h) - f(z - h)) / (2 * h)
