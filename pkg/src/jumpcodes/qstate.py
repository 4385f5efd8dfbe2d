"""Sparse complex state vectors over n qubits.

Basis states are bit strings such as ``"1100"``. Qubit ``alpha`` (1-based)
is the ``alpha``-th character from the left, so ``"1100"`` has qubits 1 and 2
excited. Dense conversions use the binary value of the string as the index,
i.e. qubit 1 is the most significant bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Union

import numpy as np

from .errors import DimensionMismatch, InvalidBasisState, InvalidQubitIndex, NotNormalized

DROP_TOL = 1e-14
NORM_TOL = 1e-9

SQRT1_2 = 1.0 / math.sqrt(2.0)


def validate_basis(bits: str, n: int) -> str:
    if len(bits) != n or any(ch not in "01" for ch in bits):
        raise InvalidBasisState(f"{bits!r} is not a {n}-qubit basis string")
    return bits


def excitation_count(bits: str) -> int:
    return bits.count("1")


def flip(bits: str, alpha: int) -> str:
    """Flip qubit ``alpha`` (1-based) of a basis string."""
    i = alpha - 1
    return bits[:i] + ("0" if bits[i] == "1" else "1") + bits[i + 1 :]


class StateVector:
    """Immutable sparse ket: a mapping from basis strings to amplitudes.

    Amplitudes with magnitude below ``drop_tol`` are pruned at construction.
    """

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms: Mapping[str, complex] | None = None, drop_tol: float = DROP_TOL):
        self.n = int(n)
        kept = {}
        for bits, amp in (terms or {}).items():
            amp = complex(amp)
            if abs(amp) >= drop_tol:
                kept[bits] = amp
        self._terms = kept

    @property
    def terms(self) -> Mapping[str, complex]:
        return MappingProxyType(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __repr__(self) -> str:
        body = " + ".join(f"({amp:.6g})|{bits}>" for bits, amp in sorted(self._terms.items()))
        return f"StateVector(n={self.n}, {body or '0'})"

    def amplitude(self, bits: str) -> complex:
        return self._terms.get(bits, 0j)

    def norm_squared(self) -> float:
        return sum(a.real * a.real + a.imag * a.imag for a in self._terms.values())

    def norm(self) -> float:
        return math.sqrt(self.norm_squared())

    def is_zero(self) -> bool:
        return not self._terms

    def scaled(self, factor: complex) -> StateVector:
        return StateVector(self.n, {b: factor * a for b, a in self._terms.items()})

    def normalized(self) -> StateVector:
        nrm = self.norm()
        if nrm == 0.0:
            raise NotNormalized("cannot normalize the zero vector")
        return self.scaled(1.0 / nrm)

    def __add__(self, other: StateVector) -> StateVector:
        _check_dims(self, other)
        out = dict(self._terms)
        for b, a in other._terms.items():
            out[b] = out.get(b, 0j) + a
        return StateVector(self.n, out)

    def __sub__(self, other: StateVector) -> StateVector:
        return self + other.scaled(-1.0)

    def __rmul__(self, factor: complex) -> StateVector:
        return self.scaled(factor)

    def __mul__(self, factor: complex) -> StateVector:
        return self.scaled(factor)

    def excitations(self) -> set[int]:
        """Distinct excitation numbers present in the support."""
        return {excitation_count(b) for b in self._terms}

    def to_dense(self) -> np.ndarray:
        vec = np.zeros(2**self.n, dtype=complex)
        for b, a in self._terms.items():
            vec[int(b, 2)] = a
        return vec

    @classmethod
    def from_dense(cls, vec: np.ndarray, drop_tol: float = DROP_TOL) -> StateVector:
        vec = np.asarray(vec, dtype=complex)
        n = int(round(math.log2(vec.size)))
        if 2**n != vec.size:
            raise DimensionMismatch(f"dense vector of size {vec.size} is not a qubit register")
        idx = np.nonzero(np.abs(vec) >= drop_tol)[0]
        return cls(n, {format(int(i), f"0{n}b"): vec[i] for i in idx}, drop_tol)

    def to_json_obj(self) -> dict:
        return {
            "n": self.n,
            "terms": [
                {"basis": b, "re": a.real, "im": a.imag} for b, a in sorted(self._terms.items())
            ],
        }

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> StateVector:
        n = int(obj["n"])
        return make_state(n, [(t["basis"], complex(t["re"], t.get("im", 0.0))) for t in obj["terms"]])


def _check_dims(a: StateVector, b: StateVector) -> None:
    if a.n != b.n:
        raise DimensionMismatch(f"qubit counts differ: {a.n} vs {b.n}")


def make_state(n: int, terms: Iterable[tuple[str, complex]]) -> StateVector:
    """Build an (unnormalized) superposition; repeated basis strings are summed."""
    acc: dict[str, complex] = {}
    for bits, amp in terms:
        validate_basis(bits, n)
        acc[bits] = acc.get(bits, 0j) + complex(amp)
    return StateVector(n, acc)


def basis_state(bits: str) -> StateVector:
    return make_state(len(bits), [(bits, 1.0)])


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    _check_dims(a, b)
    small, large = (a._terms, b._terms) if len(a) <= len(b) else (b._terms, a._terms)
    total = 0j
    for bits in small:
        if bits in large:
            total += a._terms[bits].conjugate() * b._terms[bits]
    return total


def fidelity(a: StateVector, b: StateVector) -> float:
    for s in (a, b):
        if abs(s.norm() - 1.0) > NORM_TOL:
            raise NotNormalized(f"state has norm {s.norm():.3g}")
    return min(1.0, abs(inner_product(a, b)) ** 2)


def phase_aligned_distance(target: StateVector, state: StateVector) -> float:
    """min over theta of || state - e^{i theta} target ||."""
    # form the difference explicitly; the closed form cancels badly near zero
    overlap = inner_product(target, state)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return (state - target * phase).norm()


# -- gates -----------------------------------------------------------------


@dataclass(frozen=True)
class X:
    q: int


@dataclass(frozen=True)
class H:
    q: int


@dataclass(frozen=True)
class CNOT:
    c: int
    t: int


Gate = Union[X, H, CNOT]


def _check_qubit(q: int, n: int) -> None:
    if not 1 <= q <= n:
        raise InvalidQubitIndex(f"qubit {q} outside 1..{n}")


def apply_gate(psi: StateVector, gate: Gate) -> StateVector:
    n = psi.n
    out: dict[str, complex] = {}
    if isinstance(gate, X):
        _check_qubit(gate.q, n)
        for b, a in psi.terms.items():
            out[flip(b, gate.q)] = a
    elif isinstance(gate, H):
        _check_qubit(gate.q, n)
        i = gate.q - 1
        for b, a in psi.terms.items():
            lo = b[:i] + "0" + b[i + 1 :]
            hi = b[:i] + "1" + b[i + 1 :]
            sign = -1.0 if b[i] == "1" else 1.0
            out[lo] = out.get(lo, 0j) + SQRT1_2 * a
            out[hi] = out.get(hi, 0j) + sign * SQRT1_2 * a
    elif isinstance(gate, CNOT):
        _check_qubit(gate.c, n)
        _check_qubit(gate.t, n)
        if gate.c == gate.t:
            raise InvalidQubitIndex("CNOT control and target must differ")
        for b, a in psi.terms.items():
            out[flip(b, gate.t) if b[gate.c - 1] == "1" else b] = a
    else:
        raise TypeError(f"unknown gate {gate!r}")
    return StateVector(n, out)


def apply_gates(psi: StateVector, gates: Iterable[Gate]) -> StateVector:
    for g in gates:
        psi = apply_gate(psi, g)
    return psi

