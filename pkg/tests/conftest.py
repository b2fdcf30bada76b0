from __future__ import annotations

import sys
from collections import OrderedDict
from pathlib import Path

import pytest

from forcing_lab.errors import NoMutationFound
from forcing_lab.instances import mutate_X, random_instance, two_branch

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"

X0 = "{}"
X1 = "{{}}"
X2 = "{{},{{}}}"
X3 = "{{},{{}},{{{}}}}"

CORPUS_SEEDS = range(200)

# criterion label -> list of (test name, outcome)
_ACCEPTANCE: OrderedDict[str, list] = OrderedDict()


def build_corpus():
    """T1 with X1, X2, X3, seeded random instances and their negatives."""
    out = [two_branch(X1), two_branch(X2), two_branch(X3)]
    for seed in CORPUS_SEEDS:
        inst = random_instance(seed)
        out.append(inst)
        try:
            out.append(mutate_X(inst, seed, max_size=5)[0])
        except NoMutationFound:
            pass
    return out


@pytest.fixture(scope="session")
def corpus():
    return build_corpus()


@pytest.fixture
def t1():
    return two_branch(X1)


@pytest.fixture
def t1_x2():
    return two_branch(X2)


@pytest.fixture
def t1_x3():
    return two_branch(X3)


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion this test decides")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE.setdefault(marker.args[0], []).append((item.name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, results in _ACCEPTANCE.items():
        failed = [name for name, outcome in results if outcome != "passed"]
        status = "FAIL" if failed else "PASS"
        suffix = f"  (failing: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"{status}  {label}{suffix}")
