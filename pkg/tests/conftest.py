import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402


@pytest.fixture(scope="session")
def census3():
    from uobkit.census import run_census

    report, colorings = run_census(3, up_to_symmetry=True, workers=1)
    return report, colorings


@pytest.fixture(scope="session")
def oracle3():
    words = oracles.brute_census(3)
    return words, oracles.brute_maximal(words)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(lines):
        terminalreporter.write_line(lines[k])
