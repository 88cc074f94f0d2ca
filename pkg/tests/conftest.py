import pytest

from poisson_krieger import (
    build_type_ii_inf, build_type_iii0, build_type_iii1, build_type_iii_lambda,
)

# acceptance lines, filled by test_acceptance and echoed after the run
ACCEPTANCE: dict[int, str] = {}


@pytest.fixture(scope="session")
def four_specs():
    return {
        "ii-inf": build_type_ii_inf(256),
        "iii-0": build_type_iii0(256),
        "iii-lambda": build_type_iii_lambda(0.5, 256),
        "iii-1": build_type_iii1(0.5, 1 / 3, 256),
    }


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
