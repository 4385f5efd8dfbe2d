"""Unitary recoveries that undo a detected jump on the code space."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .codes import CONDITION_TOL, Codebook, complement, gram_matrix
from .dynamics import DecayModel, apply_pattern
from .errors import (
    InvalidParameters,
    InvalidQubitIndex,
    JumpAnnihilatesCode,
    NotRecoverable,
    RecoveryUnavailable,
    TooLargeForOracle,
)
from .qstate import CNOT, SQRT1_2, Gate, H, StateVector, X, apply_gates, phase_aligned_distance

MAX_SYNTH_QUBITS = 10


def recovery_circuit(alpha: int, n: int) -> tuple[Gate, ...]:
    """Gates of R_alpha in application order.

    The operator product pi_a (prod_b C_ab) pi_a H_a is read right to left,
    with the pi-rotation realized as Pauli X.
    """
    if not 1 <= alpha <= n:
        raise InvalidQubitIndex(f"qubit {alpha} outside 1..{n}")
    fan_out = [CNOT(alpha, b) for b in range(1, n + 1) if b != alpha]
    return (H(alpha), X(alpha), *fan_out, X(alpha))


def gates_to_json(gates: Iterable[Gate]) -> list[dict]:
    out = []
    for g in gates:
        if isinstance(g, CNOT):
            out.append({"gate": "CNOT", "c": g.c, "t": g.t})
        else:
            out.append({"gate": type(g).__name__, "q": g.q})
    return out


def gates_from_json(items: Sequence[dict]) -> tuple[Gate, ...]:
    out = []
    for item in items:
        kind = item["gate"]
        if kind == "CNOT":
            out.append(CNOT(int(item["c"]), int(item["t"])))
        elif kind == "H":
            out.append(H(int(item["q"])))
        elif kind == "X":
            out.append(X(int(item["q"])))
        else:
            raise InvalidParameters(f"unknown gate {kind!r}")
    return tuple(out)


@dataclass(frozen=True)
class RecoveryMap:
    """A recovery for one jump pattern, as a gate list or a dense unitary."""

    pattern: tuple[int, ...]
    n: int
    gates: tuple[Gate, ...] | None = None
    unitary: np.ndarray | None = None

    def apply(self, psi: StateVector) -> StateVector:
        if self.gates is not None:
            return apply_gates(psi, self.gates)
        return StateVector.from_dense(self.unitary @ psi.to_dense())


def circuit_recovery(alpha: int, n: int) -> RecoveryMap:
    return RecoveryMap((alpha,), n, gates=recovery_circuit(alpha, n))


def _orthonormal_complement(frame: np.ndarray) -> np.ndarray:
    """Complete ``frame`` (orthonormal columns) using the standard basis in index order."""
    dim, l = frame.shape
    basis = np.zeros((dim, dim), dtype=complex)
    basis[:, :l] = frame
    m = l
    for j in range(dim):
        if m == dim:
            break
        v = np.zeros(dim, dtype=complex)
        v[j] = 1.0
        q = basis[:, :m]
        for _ in range(2):
            v = v - q @ (q.conj().T @ v)
        nrm = np.linalg.norm(v)
        if nrm > 1e-8:
            basis[:, m] = v / nrm
            m += 1
    return basis[:, l:]


def synthesize_recovery(
    code: Codebook, pattern: Sequence[int], model: DecayModel, tol: float = CONDITION_TOL
) -> RecoveryMap:
    """Unitary sending the normalized jumped frame L_e|c_i>/sqrt(Lambda_e) back to |c_i>.

    Both frames are completed to bases of the full register by Gram-Schmidt
    over the computational basis, and the completions are matched in order.
    """
    pattern = tuple(pattern)
    if code.n > MAX_SYNTH_QUBITS:
        raise TooLargeForOracle(f"synthesized recoveries are dense; capped at {MAX_SYNTH_QUBITS} qubits")
    images = [apply_pattern(w, pattern, model) for w in code.codewords]
    gram = gram_matrix(images)
    lam = float(np.mean(np.real(np.diag(gram))))
    if lam < tol:
        raise JumpAnnihilatesCode(f"pattern {pattern} annihilates the code space")
    dev = float(np.max(np.abs(gram - lam * np.eye(code.l))))
    if dev >= tol:
        raise NotRecoverable(f"pattern {pattern} violates the recovery condition by {dev:.3g}")

    frame_in = np.column_stack([v.to_dense() for v in images]) / math.sqrt(lam)
    frame_out = np.column_stack([w.to_dense() for w in code.codewords])
    comp_in = _orthonormal_complement(frame_in)
    comp_out = _orthonormal_complement(frame_out)
    unitary = frame_out @ frame_in.conj().T + comp_out @ comp_in.conj().T
    unitary.setflags(write=False)
    return RecoveryMap(pattern, code.n, unitary=unitary)


def is_complementary_pair_code(code: Codebook) -> bool:
    for w in code.codewords:
        terms = w.terms
        if len(terms) != 2:
            return False
        (b1, a1), (b2, a2) = sorted(terms.items())
        if b2 != complement(b1) or abs(a1 - SQRT1_2) > 1e-12 or abs(a2 - SQRT1_2) > 1e-12:
            return False
    return True


class CodeRecovery:
    """Recovery provider for single detected jumps on a given code.

    ``method="auto"`` uses the gate circuit for the four-qubit
    complementary-pair code and the synthesized unitary otherwise.
    """

    def __init__(self, code: Codebook, model: DecayModel, method: str = "auto"):
        if method not in ("auto", "circuit", "synthesized"):
            raise InvalidParameters(f"unknown recovery method {method!r}")
        if method == "auto":
            method = "circuit" if code.n == 4 and is_complementary_pair_code(code) else "synthesized"
        self.code = code
        self.model = model
        self.method = method
        self._cache: dict[int, RecoveryMap] = {}

    def __call__(self, alpha: int) -> RecoveryMap:
        if alpha not in self._cache:
            try:
                if self.method == "circuit":
                    self._cache[alpha] = circuit_recovery(alpha, self.code.n)
                else:
                    self._cache[alpha] = synthesize_recovery(self.code, (alpha,), self.model)
            except (JumpAnnihilatesCode, NotRecoverable, InvalidQubitIndex) as exc:
                raise RecoveryUnavailable(f"no recovery for position {alpha}: {exc}") from exc
        return self._cache[alpha]


def random_code_states(code: Codebook, count: int, seed: int = 0) -> list[StateVector]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        coeffs = rng.normal(size=code.l) + 1j * rng.normal(size=code.l)
        coeffs /= np.linalg.norm(coeffs)
        psi = StateVector(code.n)
        for c, w in zip(coeffs, code.codewords):
            psi = psi + w.scaled(c)
        out.append(psi.normalized())
    return out


def verify_left_inverse(
    code: Codebook,
    pattern: Sequence[int],
    recovery: RecoveryMap,
    model: DecayModel,
    n_random: int = 20,
    seed: int = 0,
) -> float:
    """Max phase-aligned distance between psi and recovery(normalize(L_e psi)).

    Taken over the codewords and ``n_random`` random code-space states.
    """
    worst = 0.0
    for psi in list(code.codewords) + random_code_states(code, n_random, seed):
        jumped = apply_pattern(psi, pattern, model)
        if jumped.is_zero():
            return math.inf
        restored = recovery.apply(jumped.normalized())
        worst = max(worst, phase_aligned_distance(psi, restored))
    return worst
