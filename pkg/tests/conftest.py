def pytest_itemcollected(item):
    mark = item.get_closest_marker("criterion")
    if mark:
        num, title = mark.args
        item.user_properties += [("criterion", num), ("title", title)]


def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion."""
    status = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            props = dict(getattr(rep, "user_properties", ()))
            if "criterion" not in props:
                continue
            key = (props["criterion"], props["title"])
            if outcome != "passed":
                status[key] = "FAIL"
            elif rep.when == "call":
                status.setdefault(key, "PASS")
    if status:
        terminalreporter.section("acceptance criteria")
        for (num, title), s in sorted(status.items()):
            terminalreporter.write_line(f"criterion {num:>2}: {s}  {title}")
