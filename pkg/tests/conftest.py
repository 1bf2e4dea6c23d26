import math
from functools import lru_cache
from pathlib import Path

import mpmath
import pytest

from sturm_delay import Constant, Poly, ProblemSpec, Sinusoid, load_spec

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"

H1, H2 = 1.0, 2.0
ZERO = [Constant(0.0)] * 3
ONE = [Constant(1.0)] * 3
COS = [Sinusoid(1.0, 1.0, 0.0, 0.0)] * 3
# retard(x) = (x - segment start) / 2
LINEAR_RETARD = [Poly((0.0, 0.5)), Poly((-H1 / 2, 0.5)), Poly((-H2 / 2, 0.5))]


def free(delta=1.0, theta=1.0, **numerics):
    spec = ProblemSpec.build(H1, H2, delta, theta, ZERO, ZERO)
    return spec.with_numerics(**numerics) if numerics else spec


def make(q, retard, delta=1.0, theta=1.0):
    return ProblemSpec.build(H1, H2, delta, theta, q, retard)


def suite():
    """Test problems; all satisfy conditions a)/b)."""
    return {
        "free": free(),
        "cos_jumps": load_spec(PROBLEMS / "cos_jumps.json"),
        "cos_linear_retard": load_spec(PROBLEMS / "cos_linear_retard.json"),
        "one_linear_retard": make(ONE, LINEAR_RETARD),
        "table_potential": load_spec(PROBLEMS / "table_potential.json"),
    }


SMOOTH = ("cos_jumps", "cos_linear_retard", "one_linear_retard")


@lru_cache(maxsize=None)
def free_root(N: int) -> float:
    """Root of tan(mu pi + pi/4) = mu near N + 1/4, by mpmath Newton at 30 digits."""
    mpmath.mp.dps = 30
    g = lambda m: m * mpmath.cos(m * mpmath.pi + mpmath.pi / 4) - mpmath.sin(m * mpmath.pi + mpmath.pi / 4)
    start = N + 0.25 - 1 / (math.pi * (N + 0.25))
    return float(mpmath.findroot(g, start, solver="newton"))


@pytest.fixture(scope="session")
def problems():
    return suite()


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
