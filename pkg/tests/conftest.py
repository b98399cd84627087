import numpy as np
import pytest

from scalelaws import ImageCube


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def small_cube(rng):
    return ImageCube(rng.integers(0, 20, size=(12, 10, 2)), "fixture")


@pytest.fixture
def constant_cube():
    return ImageCube(np.full((16, 16, 1), 7.0), "constant")



ACCEPTANCE_LINES = []


@pytest.fixture
def record():
    """Collect one pass/fail line per acceptance criterion for the terminal summary."""
    def _record(criterion, ok, detail=""):
        status = "SKIP" if ok is None else "PASS" if ok else "FAIL"
        ACCEPTANCE_LINES.append(f"[{status}] {criterion}: {detail}")
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
