import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from krzyz.measure import AtomicMeasure

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], max_examples=100
)
settings.load_profile("default")


def random_measure(rng: np.random.Generator, max_atoms: int = 6, max_mass: float = 2.0) -> AtomicMeasure:
    N = int(rng.integers(1, max_atoms + 1))
    masses = rng.uniform(0.01, max_mass, N)
    angles = rng.uniform(0.0, 2 * math.pi, N)
    return AtomicMeasure(tuple(masses), tuple(angles))


@st.composite
def measures(draw, max_atoms: int = 6, max_mass: float = 2.0):
    N = draw(st.integers(1, max_atoms))
    masses = draw(st.lists(st.floats(0.01, max_mass), min_size=N, max_size=N))
    angles = draw(
        st.lists(st.floats(0.0, 2 * math.pi, exclude_max=True), min_size=N, max_size=N, unique=True)
    )
    return AtomicMeasure(tuple(masses), tuple(angles))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for an acceptance criterion and return the verdict."""

    def record(number: int, passed: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        print(line)
        _ACCEPTANCE_LINES.append(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
