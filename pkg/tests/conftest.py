import pytest

from zetadyn.rotation import ensure_cached
from zetadyn.zeros import zeros_up_to_index

# filled by test_acceptance; printed once at the end of the run
ACCEPTANCE_RESULTS = {}


@pytest.fixture(scope="session")
def first_zeros():
    """The first 20 zeros at binary64 precision."""
    return zeros_up_to_index(20, 14)


@pytest.fixture(scope="session")
def zeros30(first_zeros):
    """Rows 1-4, 10 and 100 refined to 30 digits."""
    return ensure_cached(list(first_zeros), [1, 2, 3, 4, 10, 100], 30)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
