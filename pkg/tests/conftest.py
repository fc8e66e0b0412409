import pytest


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            props = dict(getattr(rep, "user_properties", []))
            if "criterion" in props and rep.when == "call":
                lines.append((props["criterion"], outcome.upper()[:4], props.get("detail", "")))
    if lines:
        terminalreporter.section("acceptance criteria")
        for num, status, detail in sorted(lines):
            terminalreporter.write_line(f"criterion {num:>2}: {status}  {detail}")


@pytest.fixture
def criterion(record_property):
    """Tag an acceptance test with its number; ``note`` attaches a measured detail."""

    def tag(num, note=""):
        record_property("criterion", num)
        if note:
            record_property("detail", note)

    return tag
