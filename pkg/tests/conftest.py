import pytest

_criteria: dict[int, list] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            item.user_properties.append(("criterion", m.args[0]))


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    if report.when == "call" or report.failed:
        _criteria.setdefault(crit, []).append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(_criteria):
        runs = _criteria[crit]
        ok = all(outcome == "passed" for _, outcome in runs)
        names = ", ".join(name for name, _ in runs)
        tr.write_line(f"criterion {crit:>2}: {'PASS' if ok else 'FAIL'}  ({names})")


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20240611)
