import hypothesis

# Deterministic property tests: no flaky CI reruns, no example database
# carry-over between environments.
hypothesis.settings.register_profile(
    "suite",
    max_examples=200,
    deadline=None,
    derandomize=True,
    database=None,
)
hypothesis.settings.load_profile("suite")

# criterion number -> (label, passed, detail); filled by test_acceptance.py
ACCEPTANCE_RESULTS = {}


def record_criterion(number: int, label: str, passed: bool, detail: str = ""):
    ACCEPTANCE_RESULTS[number] = (label, bool(passed), detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        label, ok, detail = ACCEPTANCE_RESULTS[number]
        line = f"criterion {number} ({label}): {'PASS' if ok else 'FAIL'}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
