from collections import defaultdict

_outcomes = defaultdict(list)


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    props = dict(report.user_properties)
    if "criterion" in props:
        _outcomes[props["criterion"]].append((report.passed, props.get("measured", "")))


def pytest_runtest_setup(item):
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        item.user_properties.append(("criterion", mark.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        results = _outcomes[n]
        status = "PASS" if all(ok for ok, _ in results) else "FAIL"
        passed = sum(ok for ok, _ in results)
        details = "; ".join(m for _, m in results if m)
        terminalreporter.write_line(f"criterion {n:>2}: {status} ({passed}/{len(results)} checks) {details}")
