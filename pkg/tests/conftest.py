import numpy as np
import pytest

from coalition_interact import CommGraph, horse_market, messages
from coalition_interact.core import TUGame

EXAMPLE_EDGES = [(1, 2), (1, 3), (2, 4), (3, 4), (3, 5)]


def random_game(rng, n, integer=True):
    vals = rng.integers(-9, 10, 1 << n).astype(float) if integer else rng.normal(size=1 << n)
    vals[0] = 0.0
    return TUGame(n, vals)


def random_tree(rng, n):
    # random recursive tree: node k attaches to an earlier node
    return CommGraph.from_edges(n, [(int(rng.integers(1, k)), k) for k in range(2, n + 1)])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def example_graph():
    return CommGraph.from_edges(5, EXAMPLE_EDGES)


@pytest.fixture
def msg():
    return messages(5)


@pytest.fixture
def horse():
    return horse_market()


# one PASS/FAIL line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("acceptance")
    if crit is None or (report.when != "call" and not report.failed):
        return
    status = "PASS" if report.passed else "FAIL"
    ACCEPTANCE_LINES[crit[0]] = f"criterion {crit[0]:>2} {status}  {crit[1]}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
