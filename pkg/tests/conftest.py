import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from redundex.codes import build_protocol, builtin_code  # noqa: E402

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def golden_dir():
    return GOLDEN


def proto(code: str, kind: str):
    return build_protocol(builtin_code(code), kind)


ALL_PROTOCOLS = [
    ("bitflip", "minimal"), ("bitflip", "ft"), ("bitflip", "dbr"),
    ("steane", "minimal"), ("steane", "ft"), ("steane", "mr"), ("steane", "dbr"),
    ("perfect5", "minimal"), ("perfect5", "ft"), ("perfect5", "mr"), ("perfect5", "dbr"),
]


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
