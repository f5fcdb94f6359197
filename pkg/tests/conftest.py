import pytest

# criterion number -> CriterionResult, filled by test_acceptance.py
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def acceptance_results():
    return ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n].line())
    passed = sum(r.passed for r in ACCEPTANCE.values())
    terminalreporter.write_line(f"{passed}/{len(ACCEPTANCE)} criteria passed")
