import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from contextuality.behavior import from_correlators, make_behavior
from contextuality.scenario import path_scenario, n_cycle

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def path3():
    return path_scenario()


@pytest.fixture
def pr_box():
    return from_correlators(4, [1, 1, 1, -1], [0, 0, 0, 0])


@pytest.fixture
def pr_box_exact():
    return from_correlators(4, [1, 1, 1, -1], [0, 0, 0, 0], exact=True)


@pytest.fixture
def uniform_cycle4():
    s = n_cycle(4)
    return make_behavior(s, [[0.25] * 4] * 4)
