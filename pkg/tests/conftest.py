def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.CRITERIA):
        if n in mod.RESULTS:
            terminalreporter.write_line(mod.format_result(n, mod.RESULTS[n]))
        else:
            terminalreporter.write_line(f"criterion {n:2d}: NOT RUN")
