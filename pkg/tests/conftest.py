from pathlib import Path

import pytest

from energy_source_game import GameInstance, PriceSchedule

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"

# filled by test_acceptance; printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def scenarios_dir():
    return SCENARIOS


@pytest.fixture
def reference_instance():
    """Two-type mixed instance whose slacks are both exactly 180."""
    return GameInstance.from_arrays(500, 10, PriceSchedule(0.3, 5, 10),
                                    [100, 180], [271 / 140, 1.95], [0.3, 0.7])
