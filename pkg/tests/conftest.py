import numpy as np
import pytest
from hypothesis import strategies as st

from evslv import ModelSpec3

X_BASE = (0.1, 0.1, 0.1)


@pytest.fixture
def base_pos():
    return ModelSpec3.baseline(0.1)


@pytest.fixture
def base_neg():
    return ModelSpec3.baseline(-0.1)


def coef(lo=0.05, hi=1.0):
    return st.floats(lo, hi, allow_nan=False, allow_infinity=False)


@st.composite
def template_specs(draw):
    """Random specs that satisfy the sign template; a31 takes either sign."""
    rE, rV, rS = -draw(coef(0.01, 0.5)), draw(coef(0.01, 0.5)), -draw(coef(0.01, 0.5))
    a12, a13, a23, a32 = (draw(coef()) for _ in range(4))
    a21 = -draw(coef())
    a31 = draw(coef()) * draw(st.sampled_from([-1.0, 1.0]))
    A = [[0.0, a12, a13], [a21, 0.0, a23], [a31, a32, 0.0]]
    return ModelSpec3([rE, rV, rS], A)


@st.composite
def general_specs(draw, lo=-1.0, hi=1.0):
    vals = st.floats(lo, hi, allow_nan=False, allow_infinity=False)
    r = [draw(vals) for _ in range(3)]
    A = [[draw(vals) for _ in range(3)] for _ in range(3)]
    return ModelSpec3(r, A, enforce_template=False)


def states(lo=0.05, hi=2.0, n=3):
    return st.lists(st.floats(lo, hi, allow_nan=False), min_size=n, max_size=n).map(np.array)


# acceptance lines, echoed in the terminal summary so they survive output capture
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
