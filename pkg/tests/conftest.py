import os
import sys

import pytest
from hypothesis import HealthCheck, settings

from localct.galois import galois_group
from localct.tower import build_tower

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

TOWER_DATA = {
    "Q2i": (2, [0, 1], [2, 2, 1]),
    "Q2s2": (2, [0, 1], [-2, 0, 1]),
    "Q3z": (3, [0, 1], [3, 3, 1]),
    "U2": (2, [1, 1, 1], [-2, 1]),
    "U5": (5, [1, 1, 1], [-5, 1]),
}
RAMIFIED = ("Q2i", "Q2s2", "Q3z")

LT_PARAMS = {2: dict(p=2, pi=2, f=[0, 2, 1]), 3: dict(p=3, pi=3, f=[0, 3, 0, 1]), 5: dict(p=5, pi=5, f=[0, 5, 0, 0, 0, 1])}
ELLIPTIC_A = (1, 0, 1, -1, 0)

_cache = {}


def tower(name, N=24):
    key = (name, N)
    if key not in _cache:
        p, u, e = TOWER_DATA[name]
        t = build_tower(p, u, e, N)
        _cache[key] = (t, galois_group(t))
    return _cache[key]


@pytest.fixture(scope="session")
def towers():
    return {name: tower(name) for name in TOWER_DATA}


@pytest.fixture(scope="session")
def q2i():
    return tower("Q2i")


@pytest.fixture(scope="session")
def q2s2():
    return tower("Q2s2")


@pytest.fixture(scope="session")
def q3z():
    return tower("Q3z")


@pytest.fixture(scope="session")
def u5():
    return tower("U5")
