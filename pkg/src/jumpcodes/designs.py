"""Block designs whose class superpositions are detected-jump codes.

A block is a k-subset of the points 1..n and stands for the basis state with
exactly those qubits excited. A SEED is a list of classes of blocks; class i
becomes the equal-amplitude superposition of its blocks.
"""

from __future__ import annotations

import itertools
import logging
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .codes import Codebook, ConditionReport, dfs_basis, complement, gram_matrix, jump_patterns, verify_detected_jump
from .dynamics import DecayModel
from .errors import InvalidSeed, OddLengthUnsupported, SearchExhausted, UnsupportedOrder
from .qstate import StateVector

logger = logging.getLogger(__name__)

Block = tuple[int, ...]

# the nine blocks of the reference 2-JC(9,3,3) codeword |c_0>
C0_933_BLOCKS: tuple[Block, ...] = (
    (1, 2, 3), (4, 5, 6), (7, 8, 9),
    (1, 6, 8), (2, 4, 9), (3, 5, 7),
    (1, 5, 9), (2, 6, 7), (3, 4, 8),
)


class SeedWarning(UserWarning):
    """A block appears in more than one class."""


def block_to_bits(block: Iterable[int], n: int) -> str:
    bits = ["0"] * n
    for p in block:
        bits[p - 1] = "1"
    return "".join(bits)


def bits_to_block(bits: str) -> Block:
    return tuple(i + 1 for i, ch in enumerate(bits) if ch == "1")


def _canonical_class(blocks: Iterable[Iterable[int]]) -> tuple[Block, ...]:
    return tuple(sorted(tuple(sorted(b)) for b in blocks))


@dataclass(frozen=True)
class SeedDesign:
    n: int
    k: int
    classes: tuple[tuple[Block, ...], ...]

    def __post_init__(self):
        classes = tuple(tuple(tuple(int(p) for p in b) for b in cls) for cls in self.classes)
        object.__setattr__(self, "classes", classes)
        if not classes:
            raise InvalidSeed("a design needs at least one class")
        for cls in classes:
            if not cls:
                raise InvalidSeed("empty class")
            for b in cls:
                if len(b) != self.k or len(set(b)) != self.k:
                    raise InvalidSeed(f"block {b} is not a {self.k}-subset")
                if any(not 1 <= p <= self.n for p in b):
                    raise InvalidSeed(f"block {b} has points outside 1..{self.n}")
            if len({frozenset(b) for b in cls}) != len(cls):
                raise InvalidSeed("repeated block within a class")
        if self.shared_blocks():
            warnings.warn(f"blocks shared between classes: {sorted(self.shared_blocks())}", SeedWarning, stacklevel=2)

    @property
    def l(self) -> int:
        return len(self.classes)

    def shared_blocks(self) -> set[Block]:
        seen: dict[frozenset, int] = {}
        shared = set()
        for i, cls in enumerate(self.classes):
            for b in cls:
                key = frozenset(b)
                if key in seen and seen[key] != i:
                    shared.add(tuple(sorted(b)))
                seen.setdefault(key, i)
        return shared

    def to_json_obj(self) -> dict:
        return {"n": self.n, "k": self.k, "classes": [[list(b) for b in cls] for cls in self.classes]}

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> SeedDesign:
        return cls(int(obj["n"]), int(obj["k"]), tuple(tuple(tuple(b) for b in c) for c in obj["classes"]))


# -- affine planes ----------------------------------------------------------


@dataclass(frozen=True)
class AffinePlane:
    q: int
    points: tuple[int, ...]
    lines: tuple[Block, ...]
    parallel_classes: tuple[tuple[Block, ...], ...]


def _is_prime(q: int) -> bool:
    return q >= 2 and all(q % d for d in range(2, math.isqrt(q) + 1))


def affine_plane(q: int) -> AffinePlane:
    """AG(2, q) over the prime field of order q.

    Point (r, c) is numbered r*q + c + 1, so grid rows are {1..q}, {q+1..2q}, ...
    Parallel classes are ordered: rows, slopes 1..q-1 (c = m r + b), columns.
    """
    if not _is_prime(q):
        raise UnsupportedOrder(f"only prime orders are supported, got {q}")

    def num(r: int, c: int) -> int:
        return r * q + c + 1

    classes = [tuple(tuple(num(r, c) for c in range(q)) for r in range(q))]
    for m in range(1, q):
        classes.append(
            tuple(tuple(sorted(num(r, (m * r + b) % q) for r in range(q))) for b in range(q))
        )
    classes.append(tuple(tuple(num(r, c) for r in range(q)) for c in range(q)))
    lines = tuple(line for cls in classes for line in cls)
    return AffinePlane(q, tuple(range(1, q * q + 1)), lines, tuple(classes))


def affine_1seed(q: int = 2) -> SeedDesign:
    """Design whose classes are the parallel classes of AG(2, q)."""
    plane = affine_plane(q)
    return SeedDesign(q * q, q, plane.parallel_classes)


# -- design <-> code --------------------------------------------------------


def class_state(blocks: Sequence[Block], n: int) -> StateVector:
    amp = 1.0 / math.sqrt(len(blocks))
    terms: dict[str, complex] = {}
    for b in blocks:
        bits = block_to_bits(b, n)
        terms[bits] = terms.get(bits, 0j) + amp
    return StateVector(n, terms)


def seed_to_code(design: SeedDesign, label: str | None = None) -> Codebook:
    words = [class_state(cls, design.n) for cls in design.classes]
    err = float(np.max(np.abs(gram_matrix(words) - np.eye(len(words)))))
    if err > 1e-12:
        raise InvalidSeed(f"class superpositions are not orthonormal (error {err:.3g})")
    if label is None:
        label = f"SEED({design.n},{design.k},{design.l})"
    return Codebook(design.n, design.k, tuple(words), label)


def block_counts(design: SeedDesign, pattern: Iterable[int]) -> list[int]:
    """Per class, the number of blocks containing every point of ``pattern``."""
    pts = set(pattern)
    return [sum(1 for b in cls if pts.issubset(b)) for cls in design.classes]


def verify_seed(design: SeedDesign, t: int, model: DecayModel) -> ConditionReport:
    """Exact condition check of the induced code, plus block-count diagnostics.

    For each pattern the diagnostics list how many blocks of each class contain
    all its points. With equal-amplitude classes the diagonal Gram entry of
    class i is proportional to count_i / |class_i|, so these fractions being
    equal is necessary for the diagonal condition.
    """
    code = seed_to_code(design)
    report = verify_detected_jump(code, t, model)
    sizes = [len(cls) for cls in design.classes]
    rows = []
    balanced_all = True
    for pattern in jump_patterns(design.n, t):
        counts = block_counts(design, pattern)
        balanced = len({Fraction(c, s) for c, s in zip(counts, sizes)}) == 1
        balanced_all &= balanced
        rows.append({"pattern": list(pattern), "counts": counts, "balanced": balanced})
    report.extra = {"counts_balanced": balanced_all, "block_counts": rows}
    return report


def build_1seed_complementary(n: int) -> SeedDesign:
    """Classes {B, complement(B)} over all n/2-subsets, in build_1jc order."""
    if n < 2 or n % 2:
        raise OddLengthUnsupported(f"complementary-pair designs need even n >= 2, got {n}")
    seen = set()
    classes = []
    for bits in dfs_basis(n):
        if bits in seen:
            continue
        other = complement(bits)
        seen.update((bits, other))
        classes.append((bits_to_block(bits), bits_to_block(other)))
    return SeedDesign(n, n // 2, tuple(classes))


# -- 2-SEED(9,3,3) search ---------------------------------------------------

_PAIRS = list(itertools.combinations(range(1, 10), 2))
_PAIR_INDEX = {p: i for i, p in enumerate(_PAIRS)}


def triple_partitions(points: Sequence[int] = tuple(range(1, 10))) -> list[tuple[Block, ...]]:
    """All partitions of ``points`` into triples, each as a sorted tuple of sorted blocks."""
    pts = tuple(sorted(points))
    if not pts:
        return [()]
    first, rest = pts[0], pts[1:]
    out = []
    for pair in itertools.combinations(rest, 2):
        block = (first, *pair)
        remaining = [p for p in rest if p not in pair]
        for tail in triple_partitions(remaining):
            out.append((block, *tail))
    return out


def _pair_vector(blocks: Iterable[Block]) -> np.ndarray:
    vec = np.zeros(len(_PAIRS), dtype=np.int64)
    for b in blocks:
        for pair in itertools.combinations(sorted(b), 2):
            vec[_PAIR_INDEX[pair]] += 1
    return vec


@dataclass
class SearchStats:
    explored: int = 0
    candidates: int = 0
    certified: int = 0


def _candidate_classes(
    target: np.ndarray, forbidden: set[Block], budget: int, stats: SearchStats
) -> list[tuple[Block, ...]]:
    """Unions of three block-disjoint triple partitions whose pair counts equal ``target``."""
    parts = [p for p in triple_partitions() if not forbidden.intersection(p)]
    vecs = np.array([_pair_vector(p) for p in parts]) if parts else np.zeros((0, len(_PAIRS)), int)
    by_vec: dict[bytes, list[int]] = {}
    for idx, v in enumerate(vecs):
        by_vec.setdefault(v.tobytes(), []).append(idx)

    found: set[tuple[Block, ...]] = set()
    for i in range(len(parts)):
        rest_i = target - vecs[i]
        if (rest_i < 0).any():
            continue
        ok = np.all(vecs[i + 1 :] <= rest_i, axis=1)
        for j in (np.nonzero(ok)[0] + i + 1).tolist():
            stats.explored += 1
            if stats.explored > budget:
                return sorted(found)
            if set(parts[i]) & set(parts[j]):
                continue
            rest_j = rest_i - vecs[j]
            for k in by_vec.get(rest_j.tobytes(), []):
                if k <= j or set(parts[k]) & (set(parts[i]) | set(parts[j])):
                    continue
                found.add(_canonical_class(parts[i] + parts[j] + parts[k]))
    return sorted(found)


def search_2seed_933(
    fixed_first_class: Optional[Sequence[Iterable[int]]] = C0_933_BLOCKS,
    budget: int = 2_000_000,
    max_solutions: Optional[int] = None,
    model: Optional[DecayModel] = None,
    stats: Optional[SearchStats] = None,
) -> list[SeedDesign]:
    """Search for 2-SEED(9,3,3) designs built from resolvable classes.

    Every class is a union of three parallel classes (partitions of the nine
    points into triples). Candidates for the remaining classes are screened by
    requiring the same pair-coverage counts as the first class, a necessary
    condition for the two-jump diagonal condition; surviving designs are
    certified with the exact checker. With ``fixed_first_class=None`` every
    resolvable class is tried as the first class, in canonical order.

    ``budget`` caps the number of partial candidates explored. Raises
    SearchExhausted when nothing is certified.
    """
    model = model or DecayModel.uniform(9)
    stats = stats if stats is not None else SearchStats()
    if fixed_first_class is None:
        anchors = _candidate_classes_free(budget, stats)
    else:
        anchors = [tuple(tuple(sorted(b)) for b in fixed_first_class)]

    solutions: list[SeedDesign] = []
    for anchor in anchors:
        if stats.explored > budget:
            break
        if len(anchor) != 9 or any(len(b) != 3 for b in anchor) or len(set(anchor)) != len(anchor):
            continue
        target = _pair_vector(anchor)
        cands = _candidate_classes(target, set(anchor), budget, stats)
        if fixed_first_class is None:
            cands = [c for c in cands if c > _canonical_class(anchor)]
        stats.candidates += len(cands)
        for a, b in itertools.combinations(cands, 2):
            if set(a) & set(b):
                continue
            design = SeedDesign(9, 3, (tuple(anchor), a, b))
            if verify_seed(design, 2, model).passed:
                stats.certified += 1
                solutions.append(design)
                if max_solutions is not None and len(solutions) >= max_solutions:
                    return solutions
    logger.info("2-SEED search explored %d partial classes, %d candidates", stats.explored, stats.candidates)
    if not solutions:
        raise SearchExhausted(
            f"no certified 2-SEED(9,3,3) after exploring {stats.explored} partial classes", stats.explored
        )
    return solutions


def _candidate_classes_free(budget: int, stats: SearchStats) -> list[tuple[Block, ...]]:
    """Every union of three block-disjoint triple partitions, canonically sorted."""
    parts = triple_partitions()
    found = set()
    for i, j, k in itertools.combinations(range(len(parts)), 3):
        stats.explored += 1
        if stats.explored > budget:
            break
        blocks = parts[i] + parts[j] + parts[k]
        if len(set(blocks)) == 9:
            found.add(_canonical_class(blocks))
    return sorted(found)
