from hypothesis import HealthCheck, settings

settings.register_profile(
    "lab",
    max_examples=30,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("lab")


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import lines

    found = lines()
    if found:
        terminalreporter.section("acceptance criteria")
        for line in found:
            terminalreporter.write_line(line)
