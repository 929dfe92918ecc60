"""Per-criterion PASS/FAIL summary for the acceptance suite."""

from collections import OrderedDict


def pytest_terminal_summary(terminalreporter):
    results = OrderedDict()
    for reports in terminalreporter.stats.values():
        for rep in reports:
            if getattr(rep, "when", None) != "call" and not getattr(rep, "failed", False):
                continue
            props = dict(getattr(rep, "user_properties", ()))
            if "criterion" not in props:
                continue
            entry = results.setdefault(props["criterion"], {"title": props.get("title", ""), "failed": []})
            if rep.failed:
                entry["failed"].append(rep.nodeid.split("::")[-1])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(results, key=int):
        entry = results[crit]
        status = "FAIL" if entry["failed"] else "PASS"
        line = f"criterion {crit:>2}: {status}  {entry['title']}"
        if entry["failed"]:
            line += f"  [failing: {', '.join(entry['failed'])}]"
        terminalreporter.write_line(line)
