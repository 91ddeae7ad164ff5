import pytest

from tactile_grasp.harness import HarnessConfig
from tactile_grasp.world import ObjectSpec


@pytest.fixture
def box():
    return ObjectSpec("Electronics Box", "box", 0.30, 0.60, 0.45, 3000.0, 0.05)


@pytest.fixture
def default_config():
    return HarnessConfig()


_CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record the outcome line for an acceptance criterion."""
    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        _CRITERIA[number] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[n])
