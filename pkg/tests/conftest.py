import random

import pytest
from hypothesis import settings

from jetchar import DrinfeldModule, FieldSpec, LocalRing

settings.register_profile("jetchar", deadline=None)
settings.load_profile("jetchar")

N = 16
PAD = 8


@pytest.fixture
def F3():
    """F_3[[π]] with q = q̂ = 3."""
    return LocalRing(FieldSpec.standard(3, 1, 1), N + PAD)


@pytest.fixture
def F9():
    """F_9[[π]] with q = 3, q̂ = 9."""
    return LocalRing(FieldSpec.standard(3, 1, 2), N + PAD)


@pytest.fixture
def F3s2():
    """q = q̂ = 3 with residue field F_9 (s = 2)."""
    return LocalRing(FieldSpec.standard(3, 1, 1, 2), N + PAD)


@pytest.fixture
def rng():
    return random.Random(12345)


def const(R, c):
    return R.constant(R.field.from_int(c))


def module(R, *coeffs):
    return DrinfeldModule(R, [const(R, c) if isinstance(c, int) else c for c in coeffs])


@pytest.fixture
def E11(F3):
    """φ(t) = π + τ + τ² over F_3[[π]]."""
    return module(F3, 1, 1)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import SCOREBOARD

    if SCOREBOARD:
        terminalreporter.section("acceptance scoreboard")
        for line in SCOREBOARD:
            terminalreporter.write_line(line)
