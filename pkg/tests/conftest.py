import os

import numpy as np
import pytest
from hypothesis import settings

from pass_ma.channel import Geometry, PhysicalConfig, UserPos

settings.register_profile("repo", deadline=None, max_examples=60, derandomize=True)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))


@pytest.fixture
def cfg():
    return PhysicalConfig()


@pytest.fixture
def geo():
    return Geometry()


def random_users(rng, L=15.0):
    return tuple(UserPos(rng.uniform(0, L), rng.uniform(-L / 2, L / 2)) for _ in range(2))


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
