"""Shared test plumbing.

Prints a one-line PASS/FAIL verdict per acceptance test at the end of the
run so the gate is auditable at a glance.
"""

ACCEPTANCE_FILE = "test_acceptance.py"

_RANK = {"passed": 1, "skipped": 2, "failed": 3, "error": 3}
_WORD = {"passed": "PASS", "skipped": "SKIP", "failed": "FAIL", "error": "FAIL"}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    verdicts: dict[str, str] = {}
    for status in _RANK:
        for rep in terminalreporter.stats.get(status, ()):
            nodeid = getattr(rep, "nodeid", "")
            if ACCEPTANCE_FILE not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            if status == "passed" and getattr(rep, "when", "call") != "call":
                continue
            if name not in verdicts or _RANK[status] > _RANK[verdicts[name]]:
                verdicts[name] = status
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(verdicts):
        label = name.removeprefix("test_").replace("_", " ")
        terminalreporter.write_line(f"[{_WORD[verdicts[name]]}] {label}")
