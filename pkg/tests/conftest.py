import numpy as np
import pytest

from blindqhe.statevector import GateKind, StateVector, apply_1q, new_basis_state

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    """Collects one PASS/FAIL line per acceptance criterion for the summary."""

    def log(name: str, passed: bool, detail: str = "") -> None:
        _ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")

    return log


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_state(rng, num_wires):
    v = rng.normal(size=2**num_wires) + 1j * rng.normal(size=2**num_wires)
    return StateVector(num_wires, v / np.linalg.norm(v))


def plus():
    return apply_1q(new_basis_state(1, [0]), GateKind.H, 1)


def minus():
    return apply_1q(new_basis_state(1, [1]), GateKind.H, 1)
