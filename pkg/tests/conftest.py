import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from mechlab.symbolic import Chart  # noqa: E402

import randgen  # noqa: E402


@pytest.fixture
def rnd():
    return randgen.rng()


@pytest.fixture
def xy():
    return Chart("P", ["x", "y"])


@pytest.fixture
def xyz():
    return Chart("R3", ["x", "y", "z"])


@pytest.fixture
def polar():
    return Chart("polar", ["t", "r"], angular=["t"])


# acceptance criterion number -> printed verdict line
ACCEPTANCE: dict = {}


@pytest.fixture
def criterion():
    """Record sub-checks of one acceptance criterion and print its verdict line."""

    def record(number: int, title: str, checks: dict) -> bool:
        ok = all(checks.values())
        failed = [name for name, v in checks.items() if not v]
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:2d}: {title}"
        if failed:
            line += f"  [failed: {', '.join(failed)}]"
        ACCEPTANCE[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
