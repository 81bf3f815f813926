"""Prints one PASS/FAIL line per acceptance criterion after the test run."""

_criteria = {}


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when != "call" and not report.failed:
        return
    entry = _criteria.setdefault(props["criterion"], {"ok": True, "tests": 0, "measured": []})
    entry["ok"] = entry["ok"] and report.passed
    entry["tests"] += 1
    if props.get("measured"):
        entry["measured"].append(props["measured"])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria, key=lambda k: int(k.split()[0])):
        entry = _criteria[key]
        verdict = "PASS" if entry["ok"] else "FAIL"
        terminalreporter.write_line(f"{verdict}  criterion {key}  ({entry['tests']} tests)")
        for line in entry["measured"]:
            terminalreporter.write_line(f"        {line}")
