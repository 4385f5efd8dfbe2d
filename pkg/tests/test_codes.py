import itertools
import json
import math

import numpy as np
import pytest

from jumpcodes.codes import (
    Codebook,
    build_1jc,
    dfs_basis,
    dfs_deviation,
    dimension_bound,
    gram_matrix,
    jump_patterns,
    logical_qubit_count,
    verify_detected_jump,
    verify_full_knill,
)
from jumpcodes.dynamics import DecayModel
from jumpcodes.errors import InvalidParameters, OddLengthUnsupported
from jumpcodes.qstate import make_state

from conftest import C0_933_KETS, WORD_C0, WORD_C1, WORD_C2, S, dense_ket, dense_lowering, find_word


def dense_gram(code, left_ops, right_ops):
    vecs = [w.to_dense() for w in code.codewords]
    return np.array([[np.vdot(left_ops @ a, right_ops @ b) for b in vecs] for a in vecs])


# =============================================================================
# decoherence-free subspace and the complementary-pair code
# =============================================================================


def test_dfs_basis_n4():
    assert dfs_basis(4) == ["0011", "0101", "0110", "1001", "1010", "1100"]


def test_dfs_basis_small_and_counts():
    assert dfs_basis(2) == ["01", "10"]
    assert len(dfs_basis(6)) == math.comb(6, 3) == 20


@pytest.mark.parametrize("n", [0, 3, 5])
def test_dfs_basis_odd_rejected(n):
    with pytest.raises(OddLengthUnsupported):
        dfs_basis(n)


def test_build_1jc_n4_contains_reference_codewords(code4):
    assert code4.l == 3 and code4.k == 2
    assert sorted([find_word(code4, WORD_C0), find_word(code4, WORD_C1), find_word(code4, WORD_C2)]) == [0, 1, 2]


def test_build_1jc_n4_canonical_order(code4):
    # lexicographic by smaller member: 0011 < 0101 < 0110
    assert [find_word(code4, w) for w in (WORD_C0, WORD_C2, WORD_C1)] == [0, 1, 2]


def test_build_1jc_small_and_counts():
    assert dict(build_1jc(2).codewords[0].terms) == {"01": S, "10": S}
    assert build_1jc(6).l == 10
    with pytest.raises(OddLengthUnsupported):
        build_1jc(5)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_codewords_in_dfs_and_passive(n):
    code = build_1jc(n)
    basis = set(dfs_basis(n))
    model = DecayModel.uniform(n, 0.9)
    for w in code.codewords:
        assert set(w.terms) <= basis
        assert dfs_deviation(w, 1.7, model) < 1e-12


def test_unequal_rates_break_passivity_but_not_conditions(code4):
    model = DecayModel.with_spread(4, 1.0, 0.2)
    assert dfs_deviation(code4.codewords[0], 1.0, model) > 1e-3
    report = verify_detected_jump(code4, 1, model)
    assert report.passed
    assert report.lambdas(1) == pytest.approx({(a,): r / 2 for a, r in zip(range(1, 5), model.rates)})


# =============================================================================
# detected-jump conditions
# =============================================================================


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_one_jump_conditions_pass(n):
    kappa = 1.3
    report = verify_detected_jump(build_1jc(n), 1, DecayModel.uniform(n, kappa))
    assert report.passed
    assert report.max_deviation < 1e-10
    assert set(report.lambdas(1)) == {(a,) for a in range(1, n + 1)}
    for lam in report.lambdas(1).values():
        assert lam == pytest.approx(kappa / 2, abs=1e-15)


def test_one_jump_grams_match_dense_oracle(code4, model4):
    report = verify_detected_jump(code4, 1, model4)
    for a in range(1, 5):
        L = dense_lowering(a, 4)
        assert np.allclose(report.check((a,)).gram, dense_gram(code4, L, L), atol=1e-15)
        assert np.allclose(dense_gram(code4, L, L), 0.5 * np.eye(3), atol=1e-15)


def test_two_jumps_fail_for_four_qubit_code(code4, model4):
    report = verify_detected_jump(code4, 2, model4)
    assert not report.passed
    assert report.repeats_annihilate is True
    chk = report.check((2, 4))
    dense = dense_gram(code4, dense_lowering(4, 4) @ dense_lowering(2, 4), dense_lowering(4, 4) @ dense_lowering(2, 4))
    assert np.allclose(chk.gram, dense, atol=1e-15)
    # only |c2> = |1010>+|0101> survives L4 L2: the diagonal is unequal, off-diagonals vanish
    assert not chk.passed
    assert chk.max_offdiag == 0
    idx = find_word(code4, WORD_C2)
    assert chk.gram[idx, idx] == pytest.approx(0.5)
    assert sorted(np.real(np.diag(chk.gram))) == pytest.approx([0, 0, 0.5])
    assert len(report.worst.pattern) == 2


def test_933_codeword_alone_passes_two_jumps():
    psi = make_state(9, [(k, 1 / 3) for k in C0_933_KETS])
    code = Codebook(9, 3, (psi,))
    report = verify_detected_jump(code, 2, DecayModel.uniform(9))
    assert report.passed
    for lam in report.lambdas(1).values():
        assert lam == pytest.approx(1 / 3, abs=1e-15)
    # dense oracle for one pair pattern
    L = dense_lowering(2, 9) @ dense_lowering(1, 9)
    v = L @ psi.to_dense()
    assert report.check((1, 2)).lam == pytest.approx(np.vdot(v, v).real, abs=1e-15)


def test_pattern_enumeration():
    assert jump_patterns(3, 2) == [(1,), (2,), (3,), (1, 2), (1, 3), (2, 3)]
    assert len(jump_patterns(9, 2)) == 9 + 36


def test_report_json_shape(code4, model4):
    obj = verify_detected_jump(code4, 2, model4).to_json_obj()
    assert obj["pass"] is False
    entry = obj["patterns"][0]
    assert set(entry) >= {"pattern", "lambda", "max_offdiag", "pass"}
    json.dumps(obj)


# =============================================================================
# full (unknown-position) conditions
# =============================================================================


def test_knill_violation_values(code4, model4):
    report = verify_full_knill(code4, model4)
    assert not report.passed
    i0, i1 = find_word(code4, WORD_C0), find_word(code4, WORD_C1)
    v42 = report.value(4, 2, i0, i1)
    v31 = report.value(3, 1, i0, i1)
    assert abs(v42 - 0.5) < 1e-12
    assert abs(v31 - 0.5) < 1e-12
    assert v42 == v31
    dense = dense_gram(code4, dense_lowering(4, 4), dense_lowering(2, 4))
    assert abs(dense[i0, i1] - 0.5) < 1e-15


def test_knill_violations_take_two_values(code4):
    kappa = 0.8
    report = verify_full_knill(code4, DecayModel.uniform(4, kappa))
    assert report.violations
    for v in report.violations:
        assert v.alpha != v.beta
        assert min(abs(abs(v.value) - kappa / 2), abs(v.value)) < 1e-12


def test_knill_diagonal_blocks_match_detected(code4, model4):
    knill = verify_full_knill(code4, model4)
    detected = verify_detected_jump(code4, 1, model4)
    for a in range(1, 5):
        assert np.array_equal(knill.checks[(a, a)].gram, detected.check((a,)).gram)


# =============================================================================
# dimension bound and optimality
# =============================================================================


def test_dimension_bound_examples():
    assert dimension_bound(4, 2, 1) == 3
    assert dimension_bound(9, 3, 2) == 7


@pytest.mark.parametrize("n", [2, 4, 6, 8, 10])
def test_complementary_code_meets_bound(n):
    bound = dimension_bound(n, n // 2, 1)
    assert bound == math.comb(n - 1, n // 2 - 1) == math.comb(n, n // 2) // 2
    assert build_1jc(n).l == bound


@pytest.mark.parametrize("args", [(4, 2, 3), (4, 5, 1), (4, 2, -1)])
def test_dimension_bound_invalid(args):
    with pytest.raises(InvalidParameters):
        dimension_bound(*args)


def test_logical_qubit_count_examples():
    assert logical_qubit_count(2) == 0
    assert logical_qubit_count(4) == pytest.approx(math.log2(3))
    assert logical_qubit_count(8) == pytest.approx(math.log2(35))


def test_logical_qubit_asymptotics():
    gaps = [n - 0.5 * math.log2(n) - logical_qubit_count(n) for n in range(2, 65, 2)]
    # C(n, n/2) ~ 2^n sqrt(2/(pi n)), so the gap tends to (1 + log2 pi)/2
    assert max(gaps) - min(gaps) < 1.0
    assert abs(gaps[-1] - gaps[-2]) < 1e-3
    assert gaps[-1] == pytest.approx(0.5 + 0.5 * math.log2(math.pi), abs=1e-2)


def test_no_four_codeword_pair_code_in_n4_dfs(model4):
    # brute force over equal-amplitude pair states (either relative sign) in the 6-dim DFS
    basis = dfs_basis(4)
    family = [
        make_state(4, [(a, S), (b, sign * S)])
        for a, b in itertools.combinations(basis, 2)
        for sign in (1, -1)
    ]
    found = 0
    for combo in itertools.combinations(family, 4):
        gram = gram_matrix(combo)
        if np.max(np.abs(gram - np.eye(4))) > 1e-12:
            continue
        code = Codebook(4, 2, combo)
        if verify_detected_jump(code, 1, model4).passed:
            found += 1
    assert found == 0


# =============================================================================
# codebook container
# =============================================================================


def test_codebook_json_round_trip(code4):
    text = json.dumps(code4.to_json_obj())
    back = Codebook.from_json_obj(json.loads(text))
    assert json.dumps(back.to_json_obj()) == text
    assert back.label == "1-JC(4,2,3)"


def test_codebook_validation():
    with pytest.raises(InvalidParameters):
        Codebook(2, 1, ())
    with pytest.raises(InvalidParameters):
        Codebook(2, 1, (make_state(2, [("11", 1)]),))
    a = make_state(2, [("01", 1)])
    with pytest.raises(InvalidParameters):
        Codebook(2, 1, (a, a))
