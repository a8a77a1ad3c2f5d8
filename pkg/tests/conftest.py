import random
from fractions import Fraction

import pytest

from mintime.convex import Dynamics
from mintime.core import MinTimeInstance, TargetSet
from mintime.geometry import Polytope
from mintime.lp import LinearProgram

SQUARE = Polytope.box((-2, -2), (0, 0))
DIAMOND = Polytope.cross(2, 1)
LEFT = Polytope(((-1, 0),))


def random_lp(rng: random.Random) -> LinearProgram:
    n = rng.randint(1, 6)
    m = rng.randint(0, 6)
    c = [Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(n)]
    cons = []
    for _ in range(m):
        row = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(n)]
        rel = rng.choice(["<=", ">=", "=="]) if rng.random() < 0.8 else "<="
        cons.append((row, rel, Fraction(rng.randint(-6, 6))))
    lower = [rng.choice([0, None, Fraction(rng.randint(-3, 3))]) for _ in range(n)]
    return LinearProgram(c, cons, lower, rng.choice(["min", "max"]))


@pytest.fixture
def diamond_square():
    return MinTimeInstance("linf", Dynamics(DIAMOND), TargetSet((SQUARE,)))


@pytest.fixture
def left_square():
    return MinTimeInstance("linf", Dynamics(LEFT), TargetSet((SQUARE,)))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
