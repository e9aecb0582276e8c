"""Shared test plumbing.

Tests marked ``@pytest.mark.acceptance(criterion=N, title=...)`` feed the
acceptance summary printed after the run: one PASS/FAIL line per criterion
number, aggregated over every test that carries that number, so a criterion
split across several test functions still reports as a single gate.
"""
from collections import defaultdict

_acceptance_meta = {}
_acceptance_results = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "acceptance(criterion, title): part of the numbered acceptance gate",
    )


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("acceptance")
        if marker is not None:
            _acceptance_meta[item.nodeid] = (
                int(marker.kwargs["criterion"]),
                str(marker.kwargs["title"]),
            )


def pytest_runtest_logreport(report):
    meta = _acceptance_meta.get(report.nodeid)
    if meta is None:
        return
    # A test counts as failed if any phase failed; the call-phase pass is
    # what marks it green.
    if report.failed or (report.when == "call" and report.passed):
        criterion, title = meta
        _acceptance_results[criterion].append(
            (report.nodeid, title, report.passed)
        )


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_acceptance_results):
        entries = _acceptance_results[criterion]
        ok = all(passed for _, _, passed in entries)
        title = entries[0][1]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(
            f"ACCEPTANCE criterion {criterion:>2}: {status} — {title}"
        )
        if not ok:
            for nodeid, _, passed in entries:
                if not passed:
                    terminalreporter.write_line(
                        f"    failing part: {nodeid.rsplit('::', 1)[-1]}"
                    )
