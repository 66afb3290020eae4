import time

import pytest

from pesp_energy.generators import gen_artificial4, gen_example_hp
from pesp_energy.pareto import sweep

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def art4():
    return gen_artificial4()


@pytest.fixture(scope="session")
def example_hp():
    return gen_example_hp()


@pytest.fixture(scope="session")
def art4_sweep(art4):
    """Unfiltered per-floor optima of the 4-train instance and the wall time."""
    start = time.perf_counter()
    points = sweep(art4)
    return points, time.perf_counter() - start


@pytest.fixture
def report():
    def record(criterion: int, ok: bool, detail: str):
        ACCEPTANCE_LINES[criterion] = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}"
        print(ACCEPTANCE_LINES[criterion])

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
