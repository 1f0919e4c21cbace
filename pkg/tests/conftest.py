import warnings

import pytest

from ggres import fixture
from ggres.core import load_file


def load_fixture(name):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        return load_file(fixture(name))


@pytest.fixture
def f2_graph():
    return load_fixture("elliptic_f2.json")


@pytest.fixture
def f3_graph():
    return load_fixture("elliptic_f3.json")


ALL_GRAPH_FIXTURES = [
    "tree_q2.json", "tree_q3.json", "tree_q5.json", "parabolic.json", "parabolic_q3.json",
    "modular_q2.json", "modular_q3.json", "modular_q4.json", "hypcyl_q2_n4.json",
    "elliptic_f2.json", "elliptic_f3.json",
]


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
