import numpy as np
import pytest
from hypothesis import settings

from cohinfo import channels
from cohinfo.states import code_state

settings.register_profile("default", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("default")

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)

# filled by tests/test_acceptance.py, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def two_qubit_code():
    """Code span{|00>, |11>} under X on the first qubit with probability 0.3."""
    rho = code_state([np.eye(4)[0], np.eye(4)[3]])
    p = 0.3
    ch = channels.KrausChannel([np.sqrt(1 - p) * np.eye(4), np.sqrt(p) * np.kron(X, I2)])
    return rho, ch


@pytest.fixture
def code_fixture():
    return two_qubit_code()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
