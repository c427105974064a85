import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from memswarm import build_graph

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_graph(rng: np.random.Generator, max_nodes=6, max_extra=5, integer_lengths=True):
    """Connected two-terminal graph: a random source-target chain plus extra edges.

    Nodes are ints; 0 is the source and 1 the target.
    """
    n = int(rng.integers(2, max_nodes + 1))
    inner = [int(v) for v in rng.permutation(np.arange(2, n))[: int(rng.integers(0, n - 1))]]
    chain = [0] + inner + [1]

    def length():
        return int(rng.integers(1, 4)) if integer_lengths else float(rng.uniform(0.2, 3.0))

    edges = [(a, b, length()) for a, b in zip(chain, chain[1:])]
    for _ in range(int(rng.integers(0, max_extra + 1))):
        a, b = (int(v) for v in rng.choice(n, size=2, replace=False))
        edges.append((a, b, length()))
    # nodes off the chain may be isolated; keep only those touched by an edge
    return build_graph(edges, 0, 1)


@st.composite
def graphs(draw, max_nodes=6, max_extra=5, integer_lengths=True):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_graph(np.random.default_rng(seed), max_nodes, max_extra, integer_lengths)


_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        prev = _criteria.get(number, (title, "PASS"))[1]
        status = "PASS" if report.passed and prev == "PASS" else "FAIL"
        if report.skipped:
            status = "SKIP"
        _criteria[number] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, status = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {title}")
