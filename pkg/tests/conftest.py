import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

from mazer.profiles import make_profile  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

DATA = os.path.join(os.path.dirname(__file__), "data")


def bundled_profiles(kappa_L):
    return {
        "mesa": make_profile("mesa", kappa_L),
        "sech2": make_profile("sech2", kappa_L, width=1.0),
        "gaussian": make_profile("gaussian", kappa_L, width=1.0),
        "sin": make_profile("sin", kappa_L, lobes=1),
    }


@pytest.fixture
def mesa10():
    return make_profile("mesa", 10.0)


@pytest.fixture
def data_dir():
    return DATA
