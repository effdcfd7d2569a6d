"""Collects acceptance outcomes and prints one line per criterion."""

import time
from contextlib import contextmanager

import pytest

_CRITERIA = {}  # number -> {"title", "outcomes", "notes"}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m:
            n, title = m.args
            entry = _CRITERIA.setdefault(n, {"title": title, "outcomes": [], "notes": []})
            item.user_properties.append(("criterion", n))


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    n = props.get("criterion")
    if n is None:
        return
    entry = _CRITERIA[n]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        entry["outcomes"].append((report.nodeid.split("::")[-1], report.outcome))
        note = props.get("note")
        if note and report.when == "call":
            entry["notes"].append(note)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        entry = _CRITERIA[n]
        outs = entry["outcomes"]
        if not outs:
            status = "NOT RUN"
        elif all(o == "passed" for _, o in outs):
            status = "PASS"
        else:
            status = "FAIL"
        line = f"criterion {n:2d}  {status:<7} {entry['title']}"
        failed = [name for name, o in outs if o != "passed"]
        if failed and len(outs) > 1:
            line += f"  (failed: {', '.join(failed)})"
        tr.write_line(line)
        for note in entry["notes"]:
            tr.write_line(f"               note: {note}")


@contextmanager
def _time_limit(seconds):
    t0 = time.perf_counter()
    yield
    elapsed = time.perf_counter() - t0
    assert elapsed < seconds, f"took {elapsed:.1f}s, limit {seconds}s"


@pytest.fixture
def time_limit():
    return _time_limit
