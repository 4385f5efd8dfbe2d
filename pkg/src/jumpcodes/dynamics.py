"""Spontaneous decay of qubits into independent reservoirs.

Each qubit alpha decays through its own jump operator
``L_alpha = sqrt(kappa_alpha) |0><1|`` acting on that qubit. The coherent part
of the dynamics is fixed to zero, which makes the no-jump evolution diagonal
in the computational basis. Units: hbar = 1, rates in 1/time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidDuration, InvalidParameters, InvalidQubitIndex, StepTooLarge, TooLargeForOracle
from .qstate import StateVector

MAX_DENSE_QUBITS = 6
EQUAL_RATE_SPREAD = 1e-12


@dataclass(frozen=True)
class DecayModel:
    """Per-qubit decay rates; the coherent Hamiltonian is always zero."""

    n: int
    rates: tuple[float, ...]

    def __post_init__(self):
        rates = tuple(float(r) for r in self.rates)
        object.__setattr__(self, "rates", rates)
        if len(rates) != self.n:
            raise InvalidParameters(f"expected {self.n} rates, got {len(rates)}")
        if any(r < 0 or not math.isfinite(r) for r in rates):
            raise InvalidParameters("decay rates must be finite and non-negative")

    @classmethod
    def uniform(cls, n: int, kappa: float = 1.0) -> DecayModel:
        return cls(n, (kappa,) * n)

    @classmethod
    def with_spread(cls, n: int, kappa: float, spread: float) -> DecayModel:
        """Rates ``kappa * (1 + delta_alpha)`` with delta spaced evenly over [-spread, spread]."""
        if n == 1:
            deltas = [0.0]
        else:
            deltas = [spread * (2.0 * i / (n - 1) - 1.0) for i in range(n)]
        return cls(n, tuple(kappa * (1.0 + d) for d in deltas))

    @property
    def kappa_ref(self) -> float:
        return max(self.rates) if self.rates else 0.0

    @property
    def equal_rates(self) -> bool:
        ref = self.kappa_ref
        if ref == 0.0:
            return True
        return (max(self.rates) - min(self.rates)) / ref < EQUAL_RATE_SPREAD

    def total_rate(self, bits: str) -> float:
        """Sum of the decay rates of the excited qubits in ``bits``."""
        return sum(r for r, ch in zip(self.rates, bits) if ch == "1")


def _check_position(alpha: int, n: int) -> None:
    if not 1 <= alpha <= n:
        raise InvalidQubitIndex(f"jump position {alpha} outside 1..{n}")


def apply_jump(psi: StateVector, alpha: int, model: DecayModel) -> StateVector:
    """Apply L_alpha. The result is unnormalized and may be the zero vector."""
    _check_position(alpha, psi.n)
    i = alpha - 1
    amp = math.sqrt(model.rates[i])
    out = {}
    for b, a in psi.terms.items():
        if b[i] == "1":
            out[b[:i] + "0" + b[i + 1 :]] = amp * a
    return StateVector(psi.n, out)


def apply_pattern(psi: StateVector, pattern: Iterable[int], model: DecayModel) -> StateVector:
    """Apply L_{a_m} ... L_{a_1} for ``pattern = (a_1, ..., a_m)``; first entry acts first."""
    for alpha in pattern:
        psi = apply_jump(psi, alpha, model)
    return psi


def conditional_evolve(psi: StateVector, t: float, model: DecayModel) -> StateVector:
    """No-jump evolution exp(-i H_eff t) with H = 0; unnormalized.

    Each basis term decays as exp(-t/2 * sum of rates of its excited qubits),
    so the squared norm of the output is the no-jump survival probability.
    """
    if t < 0:
        raise InvalidDuration(f"negative duration {t}")
    if t == 0:
        return psi
    return StateVector(
        psi.n, {b: a * math.exp(-0.5 * model.total_rate(b) * t) for b, a in psi.terms.items()}
    )


def jump_rates(psi: StateVector, model: DecayModel) -> list[float]:
    """||L_alpha psi||^2 for alpha = 1..n."""
    out = [0.0] * psi.n
    for b, a in psi.terms.items():
        p = a.real * a.real + a.imag * a.imag
        for i, ch in enumerate(b):
            if ch == "1":
                out[i] += p
    return [r * w for r, w in zip(model.rates, out)]


# -- density matrices -------------------------------------------------------


def _check_dense(n: int) -> None:
    if n > MAX_DENSE_QUBITS:
        raise TooLargeForOracle(f"dense density matrices are capped at {MAX_DENSE_QUBITS} qubits")


@dataclass(frozen=True)
class DensityMatrix:
    """Dense density operator; index order matches ``StateVector.to_dense``."""

    n: int
    data: np.ndarray

    def __post_init__(self):
        _check_dense(self.n)
        arr = np.array(self.data, dtype=complex)
        if arr.shape != (2**self.n, 2**self.n):
            raise InvalidParameters(f"density matrix shape {arr.shape} does not match n={self.n}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_state(cls, psi: StateVector) -> DensityMatrix:
        v = psi.to_dense()
        return cls(psi.n, np.outer(v, v.conj()))

    def entry(self, row: str, col: str) -> complex:
        return complex(self.data[int(row, 2), int(col, 2)])

    def trace(self) -> complex:
        return complex(np.trace(self.data))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.data - self.data.conj().T)))

    def min_eigenvalue(self) -> float:
        herm = 0.5 * (self.data + self.data.conj().T)
        return float(np.linalg.eigvalsh(herm)[0])

    def to_json_obj(self) -> dict:
        n = self.n
        entries = []
        rows, cols = np.nonzero(self.data)
        for r, c in sorted(zip(rows.tolist(), cols.tolist())):
            z = self.data[r, c]
            entries.append(
                {"row": format(r, f"0{n}b"), "col": format(c, f"0{n}b"), "re": z.real, "im": z.imag}
            )
        return {"n": n, "entries": entries}

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> DensityMatrix:
        n = int(obj["n"])
        _check_dense(n)
        data = np.zeros((2**n, 2**n), dtype=complex)
        for e in obj["entries"]:
            data[int(e["row"], 2), int(e["col"], 2)] = complex(e["re"], e["im"])
        return cls(n, data)


def lowering_operators(model: DecayModel) -> list[np.ndarray]:
    """Dense L_alpha as Kronecker products, qubit 1 leftmost."""
    n = model.n
    _check_dense(n)
    sigma = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    ops = []
    for i, rate in enumerate(model.rates):
        op = np.array([[1.0 + 0j]])
        for j in range(n):
            op = np.kron(op, sigma if j == i else np.eye(2))
        ops.append(math.sqrt(rate) * op)
    return ops


def lindblad_rhs(rho: np.ndarray, ops: Sequence[np.ndarray]) -> np.ndarray:
    out = np.zeros_like(rho)
    for L in ops:
        Ld = L.conj().T
        LdL = Ld @ L
        out += L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL)
    return out


def master_rk4(rho: DensityMatrix, model: DecayModel, t_end: float, h: float | None = None) -> DensityMatrix:
    """Integrate the master equation (H = 0) with fixed-step classical RK4.

    ``h`` defaults to 0.01 / kappa_ref. The last step is shortened to land on
    ``t_end`` exactly.
    """
    if rho.n != model.n:
        raise InvalidParameters("density matrix and decay model disagree on n")
    if t_end < 0:
        raise InvalidDuration(f"negative duration {t_end}")
    kref = model.kappa_ref
    if h is None:
        h = 0.01 / kref if kref > 0 else t_end or 1.0
    if h <= 0:
        raise InvalidDuration("step must be positive")
    if kref > 0 and h > 0.1 / kref:
        raise StepTooLarge(f"step {h} exceeds 0.1/kappa_ref = {0.1 / kref}")

    ops = lowering_operators(model)
    y = np.array(rho.data)
    n_steps = int(math.floor(t_end / h + 1e-9))
    steps = [h] * n_steps
    rest = t_end - n_steps * h
    if rest > 1e-12 * max(1.0, t_end):
        steps.append(rest)
    for dt in steps:
        k1 = lindblad_rhs(y, ops)
        k2 = lindblad_rhs(y + 0.5 * dt * k1, ops)
        k3 = lindblad_rhs(y + 0.5 * dt * k2, ops)
        k4 = lindblad_rhs(y + dt * k3, ops)
        y = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return DensityMatrix(rho.n, y)
