from __future__ import annotations

from collections import OrderedDict

import pytest

# criterion id -> {"title": str, "results": [(nodeid, passed, detail)]}
_ACCEPTANCE: "OrderedDict[str, dict]" = OrderedDict()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when != "call" and not (report.when == "setup" and report.failed):
        return
    cid, title = marker.args
    entry = _ACCEPTANCE.setdefault(cid, {"title": title, "results": []})
    detail = ""
    if report.failed:
        crash = getattr(report.longrepr, "reprcrash", None)
        detail = crash.message.splitlines()[0] if crash is not None else str(report.longrepr)[:200]
    entry["results"].append((item.nodeid.split("::")[-1], report.passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid in sorted(_ACCEPTANCE, key=lambda c: int(c.lstrip("C"))):
        entry = _ACCEPTANCE[cid]
        ok = all(passed for _, passed, _ in entry["results"])
        tr.write_line(f"{'PASS' if ok else 'FAIL'}  {cid}  {entry['title']}")
        for name, passed, detail in entry["results"]:
            if not passed:
                tr.write_line(f"        {name}: {detail}")
