import numpy as np
import pytest
from hypothesis import strategies as st

from randthresh import CellProbabilities, ContingencyTable, from_counts

STROKE = ContingencyTable(1823, 647, 110986, 6277)
COPD = ContingencyTable(318, 1631, 4679, 7538)
ANCHOR = (1 / 6, 2 / 6, 2 / 6, 1 / 6)


@pytest.fixture
def stroke_cells():
    return from_counts(STROKE)


@pytest.fixture
def copd_cells():
    return from_counts(COPD)


@pytest.fixture
def anchor_cells():
    return CellProbabilities(*ANCHOR)


@st.composite
def tables(draw, max_count=10_000, allow_zero=False):
    lo = 0 if allow_zero else 1
    cells = [draw(st.integers(lo, max_count)) for _ in range(4)]
    t = ContingencyTable(*cells)
    n01, n11, n00, n10 = cells
    if min(n11 + n10, n01 + n00, n01 + n11, n00 + n10) == 0:
        t = ContingencyTable(n01 + 1, n11 + 1, n00 + 1, n10 + 1)
    return t


@st.composite
def open_cells(draw, floor=1e-3):
    raw = [draw(st.floats(floor, 1.0)) for _ in range(4)]
    s = sum(raw)
    return CellProbabilities(*(x / s for x in raw))


def random_cells(rng, size, floor=1e-3):
    """(size, 4) interior cell probabilities from a flat Dirichlet, floored."""
    x = rng.dirichlet(np.ones(4), size=size) + floor
    return x / x.sum(axis=1, keepdims=True)


# one PASS/FAIL line per acceptance criterion, printed after the run
_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marks = report.user_properties
    for name, value in marks:
        if name == "criterion":
            _CRITERIA[value] = (report.outcome == "passed", report.duration)


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_setup(item):
    m = item.get_closest_marker("criterion")
    if m is not None:
        item.user_properties.append(("criterion", (m.args[0], m.args[1])))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for (num, title), (ok, secs) in sorted(_CRITERIA.items()):
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {title}  ({secs:.2f} s)")
