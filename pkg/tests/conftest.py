import re

import pytest

_CRITERION = re.compile(r"test_criterion_(\d+)_(\w+)")
_results = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = _CRITERION.match(item.name)
    if not m:
        return
    key = int(m.group(1))
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _results[key] = (m.group(2).replace("_", " "), rep.outcome, rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key in sorted(_results):
        name, outcome, dur = _results[key]
        status = "PASS" if outcome == "passed" else "FAIL"
        tr.write_line(f"criterion {key:2d} {status}  {name}  ({dur:.2f} s)")
    passed = sum(1 for _, o, _ in _results.values() if o == "passed")
    tr.write_line(f"{passed}/{len(_results)} acceptance criteria passed")
