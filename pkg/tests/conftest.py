from decimal import Decimal

import pytest

from zexpansion.numerics import PrecisionConfig
from zexpansion.perturbation import compute_coefficients

# exact second-order coefficient to 25 digits
E2_EXACT = Decimal("-0.1576664294691509410566793")


@pytest.fixture(scope="session")
def cfg40():
    return PrecisionConfig(40)


@pytest.fixture(scope="session")
def omega8(cfg40):
    """Default pipeline at omega = 8, P = 40, through e_6, with the P+10 digit check."""
    return compute_coefficients(8, 6, cfg40)


@pytest.fixture(scope="session")
def sympy_omega1():
    from oracles import brute_force_triples, symbolic_matrices
    return symbolic_matrices(brute_force_triples(1))


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, ok: bool, detail: str) -> bool:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
