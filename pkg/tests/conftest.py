import re
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERION = re.compile(r"test_criterion_(\d+)")
_outcomes: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = _CRITERION.match(item.name)
    if not m:
        return
    num = int(m.group(1))
    doc = (item.function.__doc__ or "").strip().splitlines()[0] if item.function.__doc__ else ""
    prev = _outcomes.get(num, ("PASS", doc))
    if rep.failed:
        _outcomes[num] = ("FAIL", doc)
    elif rep.when == "call" and prev[0] != "FAIL":
        _outcomes[num] = ("PASS" if rep.passed else "SKIP", doc)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_outcomes):
        status, doc = _outcomes[num]
        tr.write_line(f"criterion {num:2d}: {status}  {doc}")
    passed = sum(s == "PASS" for s, _ in _outcomes.values())
    tr.write_line(f"{passed}/{len(_outcomes)} criteria passed")
