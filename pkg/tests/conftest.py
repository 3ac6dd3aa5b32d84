import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from syncgames.core import load_instance  # noqa: E402


@pytest.fixture(scope="session")
def games():
    return {name: load_instance(name) for name in ("gwin", "gwinp", "glose", "g7", "g10", "g13")}


def ids(g, *names):
    return g.lookup(names)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.LINES):
            terminalreporter.write_line(line)
