import itertools
import json
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jumpcodes.codes import build_1jc, verify_detected_jump
from jumpcodes.dynamics import DecayModel
from jumpcodes.errors import InvalidSeed, OddLengthUnsupported, SearchExhausted, UnsupportedOrder
from jumpcodes.designs import (
    C0_933_BLOCKS,
    SearchStats,
    SeedDesign,
    SeedWarning,
    affine_1seed,
    affine_plane,
    block_counts,
    build_1seed_complementary,
    search_2seed_933,
    seed_to_code,
    triple_partitions,
    verify_seed,
)

from conftest import C0_933_KETS, WORD_C0, WORD_C1, WORD_C2, dense_ket


# =============================================================================
# affine planes
# =============================================================================


@pytest.mark.parametrize("q, lines, classes", [(2, 6, 3), (3, 12, 4), (5, 30, 6)])
def test_affine_plane_counts(q, lines, classes):
    plane = affine_plane(q)
    assert plane.points == tuple(range(1, q * q + 1))
    assert len(plane.lines) == lines == q * q + q
    assert len(plane.parallel_classes) == classes
    for cls in plane.parallel_classes:
        assert len(cls) == q
        assert sorted(p for line in cls for p in line) == list(plane.points)


@pytest.mark.parametrize("q", [2, 3, 5])
def test_affine_plane_pair_axiom(q):
    plane = affine_plane(q)
    for a, b in itertools.combinations(plane.points, 2):
        assert sum(1 for line in plane.lines if a in line and b in line) == 1


@pytest.mark.parametrize("q", [1, 4, 6])
def test_affine_plane_rejects_non_prime(q):
    with pytest.raises(UnsupportedOrder):
        affine_plane(q)


def test_affine_q3_rows_are_grid_rows():
    assert affine_plane(3).parallel_classes[0] == ((1, 2, 3), (4, 5, 6), (7, 8, 9))


# =============================================================================
# design to code
# =============================================================================


def test_affine_q2_gives_reference_codebook_in_order():
    code = seed_to_code(affine_1seed(2))
    for word, expected in zip(code.codewords, (WORD_C0, WORD_C1, WORD_C2)):
        assert np.max(np.abs(word.to_dense() - dense_ket(expected, 4))) < 1e-15


def test_933_class_gives_reference_codeword():
    design = SeedDesign(9, 3, (C0_933_BLOCKS,))
    word = seed_to_code(design).codewords[0]
    assert sorted(word.terms) == sorted(C0_933_KETS)
    assert all(abs(a - 1 / 3) < 1e-15 for a in word.terms.values())


def test_single_block_class():
    word = seed_to_code(SeedDesign(2, 2, (((1, 2),),))).codewords[0]
    assert dict(word.terms) == {"11": 1}


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_complementary_design_matches_pair_code(n):
    a = seed_to_code(build_1seed_complementary(n))
    b = build_1jc(n)
    assert a.l == b.l
    for x, y in zip(a.codewords, b.codewords):
        assert np.max(np.abs(x.to_dense() - y.to_dense())) < 1e-15


def test_complementary_design_examples():
    (only,) = build_1seed_complementary(2).classes
    assert set(only) == {(1,), (2,)}
    d4 = build_1seed_complementary(4)
    assert d4.l == 3 and all(len(c) == 2 for c in d4.classes)
    assert {frozenset(map(frozenset, c)) for c in d4.classes} == {
        frozenset(map(frozenset, c)) for c in affine_1seed(2).classes
    }
    assert build_1seed_complementary(6).l == 10
    with pytest.raises(OddLengthUnsupported):
        build_1seed_complementary(5)


def test_shared_block_warns_and_non_orthogonal_rejected():
    with pytest.warns(SeedWarning):
        design = SeedDesign(3, 1, (((1,),), ((1,),)))
    with pytest.raises(InvalidSeed):
        seed_to_code(design)


@pytest.mark.parametrize(
    "classes",
    [
        (((1, 2), (1, 2)),),  # repeated within a class
        (((1, 5),),),  # point out of range
        (((1,),),),  # wrong size
        ((),),
    ],
)
def test_invalid_designs(classes):
    with pytest.raises(InvalidSeed):
        SeedDesign(4, 2, classes)


def test_design_json_round_trip():
    design = affine_1seed(3)
    text = json.dumps(design.to_json_obj())
    assert text.startswith('{"n": 9, "k": 3, "classes": [[[1, 2, 3]')
    assert SeedDesign.from_json_obj(json.loads(text)) == design


# =============================================================================
# verification
# =============================================================================


def test_verify_affine_1seed(model4):
    report = verify_seed(affine_1seed(2), 1, model4)
    assert report.passed
    assert report.extra["counts_balanced"]
    for row in report.extra["block_counts"]:
        assert row["counts"] == [1, 1, 1]


def test_verify_933_class():
    kappa = 0.6
    design = SeedDesign(9, 3, (C0_933_BLOCKS,))
    report = verify_seed(design, 2, DecayModel.uniform(9, kappa))
    assert report.passed
    for lam in report.lambdas(1).values():
        assert lam == pytest.approx(kappa / 3, abs=1e-15)
    pair_counts = [block_counts(design, p)[0] for p in itertools.combinations(range(1, 10), 2)]
    assert pair_counts.count(1) == 27 and pair_counts.count(0) == 9
    columns = {(1, 4), (1, 7), (4, 7), (2, 5), (2, 8), (5, 8), (3, 6), (3, 9), (6, 9)}
    for p in columns:
        assert block_counts(design, p) == [0]


def test_broken_design_fails_on_diagonal(model4):
    # move block {1,2} from the first class into the second
    design = SeedDesign(4, 2, (((3, 4),), ((1, 4), (2, 3), (1, 2)), ((1, 3), (2, 4))))
    report = verify_seed(design, 1, model4)
    assert not report.passed
    assert not report.extra["counts_balanced"]
    # block-disjoint classes never overlap after a jump, so the failure is diagonal
    assert all(c.max_offdiag == 0 for c in report.checks)
    assert report.max_deviation > 0.1


@st.composite
def random_designs(draw):
    n = draw(st.integers(3, 6))
    k = draw(st.integers(1, n - 1))
    blocks = list(itertools.combinations(range(1, n + 1), k))
    size = draw(st.integers(1, max(1, len(blocks) // 2)))
    l = draw(st.integers(1, len(blocks) // size))
    order = draw(st.permutations(blocks))
    classes = tuple(tuple(order[i * size : (i + 1) * size]) for i in range(l))
    return SeedDesign(n, k, classes)


@settings(max_examples=150, deadline=None)
@given(random_designs(), st.integers(1, 2))
def test_unbalanced_counts_imply_failure(design, t):
    t = min(t, design.k)
    report = verify_seed(design, t, DecayModel.uniform(design.n))
    if not report.extra["counts_balanced"]:
        assert not report.passed
    if report.passed:
        code = seed_to_code(design)
        direct = verify_detected_jump(code, t, DecayModel.uniform(design.n))
        assert direct.passed
        assert direct.lambdas(t) == report.lambdas(t)


# =============================================================================
# 2-SEED(9,3,3) search
# =============================================================================


def test_triple_partition_count():
    parts = triple_partitions()
    assert len(parts) == 280 == len(set(parts))


def test_anchored_search_finds_certified_design():
    stats = SearchStats()
    model = DecayModel.uniform(9, 1.0)
    designs = search_2seed_933(stats=stats)
    assert len(designs) == 1 and stats.certified == 1
    design = designs[0]
    assert set(design.classes[0]) == set(C0_933_BLOCKS)
    first = seed_to_code(design).codewords[0]
    assert sorted(first.terms) == sorted(C0_933_KETS)
    report = verify_seed(design, 2, model)
    assert report.passed
    assert all(lam == pytest.approx(1 / 3, abs=1e-15) for lam in report.lambdas(1).values())
    direct = verify_detected_jump(seed_to_code(design), 2, model)
    assert direct.passed
    assert direct.lambdas(2) == report.lambdas(2)
    # no block is reused across classes
    all_blocks = [b for cls in design.classes for b in cls]
    assert len(set(all_blocks)) == 27


def test_anchored_search_is_reproducible():
    assert search_2seed_933() == search_2seed_933()


def test_degenerate_anchor_exhausts():
    part = ((1, 2, 3), (4, 5, 6), (7, 8, 9))
    with pytest.raises(SearchExhausted) as info:
        search_2seed_933(fixed_first_class=part * 3)
    assert info.value.explored == 0


def test_tiny_budget_exhausts_with_count():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SeedWarning)
        with pytest.raises(SearchExhausted) as info:
            search_2seed_933(fixed_first_class=None, budget=10)
    assert info.value.explored > 0
