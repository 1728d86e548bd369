import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def quarter_cone():
    from conehull.geometry import FiniteCone, Point, UnitVector

    return FiniteCone(Point(0.0, 0.0), UnitVector(1.0, 0.0), math.pi / 2, 1.0)
