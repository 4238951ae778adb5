import sys


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, ok, detail, elapsed = results[number]
        terminalreporter.write_line(
            f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}  [{elapsed:.1f}s]"
        )
