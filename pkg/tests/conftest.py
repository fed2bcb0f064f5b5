import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dlpg.normalize import to_intentional  # noqa: E402
from dlpg.term import parse_equation  # noqa: E402
from dlpg.zfunc import FzFunc  # noqa: E402

# lines recorded by the acceptance suite, echoed in the terminal summary
CRITERIA_LINES: list[str] = []


def intentional(text: str):
    return to_intentional(*parse_equation(text))[0]


@pytest.fixture
def gap_map() -> FzFunc:
    """3 -> 2, 4..7 -> 5, 8 -> 7: leaves a gap at 6 below the plateau."""
    return FzFunc.from_points(3, [2, 5, 5, 5, 5, 7])


@pytest.fixture
def plateau_map() -> FzFunc:
    """3, 4 -> 3; 5, 6, 7 -> 6; 8, 9 -> 9."""
    return FzFunc.from_points(3, [3, 3, 6, 6, 6, 9, 9])


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA_LINES:
            terminalreporter.write_line(line)
