"""Detected-jump-correcting codebooks and exact checks of their conditions.

A t-JC(n, k, l) code is a set of l orthonormal codewords, each a superposition
of n-qubit basis states with exactly k excitations, such that for every jump
pattern e of length at most t

    <c_i| L_e^dag L_e |c_j> = Lambda_e delta_ij.

Because the jump position is known, only the diagonal (alpha = beta) blocks of
the usual error-correction conditions are required.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .dynamics import DecayModel, apply_jump, apply_pattern, conditional_evolve
from .errors import InvalidParameters, OddLengthUnsupported
from .qstate import SQRT1_2, StateVector, excitation_count, inner_product, make_state, phase_aligned_distance

CONDITION_TOL = 1e-10
ORTHONORMAL_TOL = 1e-12


@dataclass(frozen=True)
class Codebook:
    n: int
    k: int
    codewords: tuple[StateVector, ...]
    label: str = ""

    def __post_init__(self):
        words = tuple(self.codewords)
        object.__setattr__(self, "codewords", words)
        if not words:
            raise InvalidParameters("a codebook needs at least one codeword")
        for w in words:
            if w.n != self.n:
                raise InvalidParameters(f"codeword on {w.n} qubits in an n={self.n} codebook")
            if any(excitation_count(b) != self.k for b in w.terms):
                raise InvalidParameters(f"codeword term with excitation count != {self.k}")
        err = np.max(np.abs(gram_matrix(words) - np.eye(len(words))))
        if err > ORTHONORMAL_TOL:
            raise InvalidParameters(f"codewords are not orthonormal (error {err:.3g})")

    @property
    def l(self) -> int:
        return len(self.codewords)

    def to_json_obj(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "label": self.label,
            "codewords": [w.to_json_obj() for w in self.codewords],
        }

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> Codebook:
        words = [StateVector.from_json_obj(w) for w in obj["codewords"]]
        return cls(int(obj["n"]), int(obj["k"]), tuple(words), str(obj.get("label", "")))


def gram_matrix(left: Sequence[StateVector], right: Sequence[StateVector] | None = None) -> np.ndarray:
    right = left if right is None else right
    out = np.zeros((len(left), len(right)), dtype=complex)
    for i, a in enumerate(left):
        for j, b in enumerate(right):
            out[i, j] = inner_product(a, b)
    return out


def _require_even(n: int) -> None:
    if n < 2 or n % 2:
        raise OddLengthUnsupported(f"the maximal-DFS construction needs even n >= 2, got {n}")


def dfs_basis(n: int) -> list[str]:
    """All basis strings with exactly n/2 excitations, lexicographically sorted."""
    _require_even(n)
    out = []
    for ones in itertools.combinations(range(n), n // 2):
        bits = ["0"] * n
        for i in ones:
            bits[i] = "1"
        out.append("".join(bits))
    return sorted(out)


def complement(bits: str) -> str:
    return bits.translate(str.maketrans("01", "10"))


def build_1jc(n: int) -> Codebook:
    """Optimal one-detected-jump code from all complementary pairs.

    Codeword order: pairs sorted by their lexicographically smaller member.
    """
    basis = dfs_basis(n)
    seen = set()
    words = []
    for b in basis:
        if b in seen:
            continue
        bc = complement(b)
        seen.update((b, bc))
        words.append(make_state(n, [(b, SQRT1_2), (bc, SQRT1_2)]))
    l = len(words)
    return Codebook(n, n // 2, tuple(words), label=f"1-JC({n},{n // 2},{l})")


def dimension_bound(n: int, k: int, t: int) -> int:
    """Upper bound C(n - t, k - t) on the number of codewords."""
    if not (0 <= t <= k <= n):
        raise InvalidParameters(f"need 0 <= t <= k <= n, got n={n}, k={k}, t={t}")
    return math.comb(n - t, k - t)


def logical_qubit_count(n: int) -> float:
    """log2 of the codeword count of the optimal even-n one-jump code."""
    _require_even(n)
    return math.log2(math.comb(n - 1, n // 2 - 1))


def dfs_deviation(psi: StateVector, t: float, model: DecayModel) -> float:
    """Phase-aligned distance between psi and its renormalized no-jump evolution."""
    evolved = conditional_evolve(psi, t, model)
    if evolved.is_zero():
        return math.inf
    return phase_aligned_distance(psi.normalized(), evolved.normalized())


# -- condition reports ------------------------------------------------------


@dataclass
class PatternCheck:
    pattern: tuple[int, ...]
    gram: np.ndarray
    lam: float
    max_offdiag: float
    max_deviation: float
    passed: bool

    def to_json_obj(self) -> dict:
        return {
            "pattern": list(self.pattern),
            "lambda": self.lam,
            "max_offdiag": self.max_offdiag,
            "max_deviation": self.max_deviation,
            "pass": self.passed,
        }


def _check_gram(pattern: tuple[int, ...], gram: np.ndarray, tol: float) -> PatternCheck:
    l = gram.shape[0]
    lam = complex(np.mean(np.diag(gram)))
    offdiag = gram - np.diag(np.diag(gram))
    max_off = float(np.max(np.abs(offdiag))) if l > 1 else 0.0
    dev = float(np.max(np.abs(gram - lam * np.eye(l))))
    return PatternCheck(pattern, gram, lam.real, max_off, dev, dev < tol)


@dataclass
class ConditionReport:
    """Outcome of checking <c_i|L_e^dag L_e|c_j> = Lambda_e delta_ij."""

    t: int
    tolerance: float
    checks: list[PatternCheck]
    repeats_annihilate: bool | None = None
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and self.repeats_annihilate is not False

    @property
    def worst(self) -> PatternCheck:
        return max(self.checks, key=lambda c: c.max_deviation)

    @property
    def max_deviation(self) -> float:
        return self.worst.max_deviation

    def lambdas(self, length: int | None = None) -> dict[tuple[int, ...], float]:
        return {c.pattern: c.lam for c in self.checks if length is None or len(c.pattern) == length}

    def check(self, pattern: Sequence[int]) -> PatternCheck:
        key = tuple(sorted(pattern))
        for c in self.checks:
            if c.pattern == key:
                return c
        raise KeyError(pattern)

    def to_json_obj(self) -> dict:
        obj = {
            "t": self.t,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "max_deviation": self.max_deviation,
            "worst_pattern": list(self.worst.pattern),
            "repeats_annihilate": self.repeats_annihilate,
            "patterns": [c.to_json_obj() for c in self.checks],
        }
        obj.update(self.extra)
        return obj


def jump_patterns(n: int, t: int) -> list[tuple[int, ...]]:
    """Sets of distinct positions of size 1..t, as sorted tuples.

    Lowering operators on different qubits commute, so every ordering of a
    set gives the same error operator.
    """
    return [p for m in range(1, min(t, n) + 1) for p in itertools.combinations(range(1, n + 1), m)]


def verify_detected_jump(
    code: Codebook, t: int, model: DecayModel, tol: float = CONDITION_TOL
) -> ConditionReport:
    if model.n != code.n:
        raise InvalidParameters("decay model and codebook disagree on n")
    if t < 1:
        raise InvalidParameters("pattern length bound t must be >= 1")
    checks = []
    for pattern in jump_patterns(code.n, t):
        images = [apply_pattern(w, pattern, model) for w in code.codewords]
        checks.append(_check_gram(pattern, gram_matrix(images), tol))
    repeats = None
    if t >= 2:
        # L_alpha^2 = 0 on a qubit, so repeated positions only need one check
        repeats = all(
            apply_pattern(w, (a, a), model).is_zero()
            for a in range(1, code.n + 1)
            for w in code.codewords
        )
    return ConditionReport(t, tol, checks, repeats)


@dataclass
class KnillViolation:
    alpha: int
    beta: int
    i: int
    j: int
    value: complex

    def to_json_obj(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "i": self.i,
            "j": self.j,
            "re": self.value.real,
            "im": self.value.imag,
        }


@dataclass
class KnillReport:
    """<c_i|L_alpha^dag L_beta|c_j> over all ordered pairs (alpha, beta)."""

    tolerance: float
    checks: dict[tuple[int, int], PatternCheck]
    violations: list[KnillViolation]

    @property
    def passed(self) -> bool:
        return not self.violations

    def value(self, alpha: int, beta: int, i: int, j: int) -> complex:
        return complex(self.checks[(alpha, beta)].gram[i, j])

    def to_json_obj(self) -> dict:
        return {
            "mode": "full-knill",
            "tolerance": self.tolerance,
            "pass": self.passed,
            "pairs": [
                {"alpha": a, "beta": b, **{k: v for k, v in c.to_json_obj().items() if k != "pattern"}}
                for (a, b), c in sorted(self.checks.items())
            ],
            "violations": [v.to_json_obj() for v in self.violations],
        }


def verify_full_knill(code: Codebook, model: DecayModel, tol: float = CONDITION_TOL) -> KnillReport:
    if model.n != code.n:
        raise InvalidParameters("decay model and codebook disagree on n")
    n = code.n
    images = {a: [apply_jump(w, a, model) for w in code.codewords] for a in range(1, n + 1)}
    checks = {}
    violations = []
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            gram = gram_matrix(images[a], images[b])
            chk = _check_gram((a, b), gram, tol)
            checks[(a, b)] = chk
            target = np.mean(np.diag(gram)) * np.eye(code.l)
            for i, j in zip(*np.nonzero(np.abs(gram - target) >= tol)):
                violations.append(KnillViolation(a, b, int(i), int(j), complex(gram[i, j])))
    return KnillReport(tol, checks, violations)
