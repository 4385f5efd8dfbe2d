"""Shared fixtures and dense Kronecker-product oracles.

The oracles here never call into the sparse code paths they check.
"""

import math
from functools import reduce

import numpy as np
import pytest

S = 1 / math.sqrt(2)

I2 = np.eye(2, dtype=complex)
PX = np.array([[0, 1], [1, 0]], dtype=complex)
PH = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
P0 = np.array([[1, 0], [0, 0]], dtype=complex)
P1 = np.array([[0, 0], [0, 1]], dtype=complex)
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|

# reference four-qubit codewords, in their conventional order
WORD_C0 = {"1100": S, "0011": S}
WORD_C1 = {"0110": S, "1001": S}
WORD_C2 = {"1010": S, "0101": S}

C0_933_KETS = [
    "111000000", "000111000", "000000111",
    "100001010", "010100001", "001010100",
    "100010001", "010001100", "001100010",
]


def kron_all(mats):
    return reduce(np.kron, mats)


def local_op(op, q, n):
    """op on qubit q (1-based, leftmost), identity elsewhere."""
    return kron_all([op if j == q else I2 for j in range(1, n + 1)])


def dense_cnot(c, t, n):
    return kron_all([P0 if j == c else I2 for j in range(1, n + 1)]) + kron_all(
        [P1 if j == c else (PX if j == t else I2) for j in range(1, n + 1)]
    )


def dense_lowering(q, n, kappa=1.0):
    return math.sqrt(kappa) * local_op(SIGMA_MINUS, q, n)


def dense_ket(terms, n):
    v = np.zeros(2**n, dtype=complex)
    for bits, a in terms.items():
        v[int(bits, 2)] += a
    return v


@pytest.fixture
def code4():
    from jumpcodes.codes import build_1jc

    return build_1jc(4)


@pytest.fixture
def model4():
    from jumpcodes.dynamics import DecayModel

    return DecayModel.uniform(4, 1.0)


def find_word(code, terms):
    """Index of the codeword equal to ``terms`` (exact amplitudes)."""
    for i, w in enumerate(code.codewords):
        if dict(w.terms) == {b: complex(a) for b, a in terms.items()}:
            return i
    raise AssertionError(f"{terms} not in codebook")


# one line per acceptance criterion, echoed again in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
