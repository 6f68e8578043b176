def pytest_terminal_summary(terminalreporter):
    """Print the acceptance criteria outcomes collected by test_acceptance."""
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for line in results:
        terminalreporter.write_line(line)
