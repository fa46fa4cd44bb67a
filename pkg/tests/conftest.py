import sys
from pathlib import Path

import pytest

from helixmoments.geometry import HelixSpec

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        for line in ACCEPTANCE[key]:
            terminalreporter.write_line(line)


@pytest.fixture
def circular():
    return HelixSpec(1.0, 0.5, 0.5, 4)


@pytest.fixture
def tall8():
    return HelixSpec(1.0, 0.25, 0.75, 8)
