import math

import pytest
from hypothesis import given, settings, strategies as st

from matcount.countlab import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    CountQuery,
    count_det_value,
    count_full_residue_zero,
    count_imm_zero_mod_p,
    count_rank,
    full_residue_intervals,
    generate_low_rank,
    invertible_count,
    iter_low_rank,
    rank_count_formula,
    run_count,
)
from matcount.polycore import IntPoly, PolyMatrixSpec, random_matrix_spec
from matcount.symgroup import Partition, immanant
from matcount.symrank import rank_rational

from oracles import brute_count, det_pred, rank_pred, squares_singular_count, sym_box

LIN2 = PolyMatrixSpec.linear(2)
SQ2 = PolyMatrixSpec.monomial(2, 2, 2)


def test_rank_examples():
    assert [count_rank(LIN2, 1, r).count for r in range(3)] == [1, 32, 48]
    assert count_rank(LIN2, 1, 2, 3).count == 48


def test_det_value_examples():
    assert count_det_value(LIN2, 1, 0).count == 33
    assert count_det_value(LIN2, 1, 1).count == 20
    assert count_det_value(SQ2, 1, 0).count == 41


def test_imm_examples():
    assert count_imm_zero_mod_p(LIN2, 1, Partition([1, 1]), 3).count == 33
    assert count_imm_zero_mod_p(LIN2, 1, Partition([2]), 3).count == 33
    with pytest.raises(ValueError):
        count_imm_zero_mod_p(PolyMatrixSpec([[[1], [0, 1]], [[0, 1], [0, 1]]]), 1, Partition([2]), 3)


def test_full_residue_examples():
    assert count_full_residue_zero(PolyMatrixSpec.linear(3), 2).count == 344
    assert count_full_residue_zero(PolyMatrixSpec.linear(3), 3).count == 8451
    assert count_full_residue_zero(LIN2, 2).count == 10


def test_h_zero_is_single_point():
    assert count_rank(PolyMatrixSpec.linear(2, 3), 0, 0).count == 1
    assert count_rank(PolyMatrixSpec.linear(2, 3), 0, 1).count == 0


def test_query_validation():
    with pytest.raises(ValueError):
        count_rank(LIN2, 1, 3)
    with pytest.raises(ValueError):
        count_rank(LIN2, 1, -1)
    with pytest.raises(ValueError):
        count_det_value(PolyMatrixSpec.linear(2, 3), 1, 0)
    with pytest.raises(ValueError):
        CountQuery(LIN2, 1, "rank_eq_modp", r=1)
    with pytest.raises(ValueError):
        CountQuery(LIN2, 1, "bogus")


def test_budget_refusal_reports_requirement():
    with pytest.raises(BudgetExceeded) as info:
        count_rank(PolyMatrixSpec.linear(3), 2, 1, budget=1000)
    assert "1953125" in str(info.value)
    assert DEFAULT_BUDGET == 10**9


def test_record_invariants():
    rec = count_rank(LIN2, 1, 1)
    assert rec.evaluations == 81
    assert 0 <= rec.count <= rec.evaluations
    assert rec.query.echo()["r"] == 1


@pytest.mark.parametrize("seed", range(6))
def test_random_specs_against_brute_force(seed):
    spec = random_matrix_spec(seed, 2, 2, 2, 3)
    for r in range(3):
        assert count_rank(spec, 1, r).count == brute_count(spec, sym_box(spec, 1), rank_pred(r))
        assert count_rank(spec, 1, r, 5).count == brute_count(spec, sym_box(spec, 1), rank_pred(r, 5))
    for a in (-2, 0, 3):
        assert count_det_value(spec, 1, a).count == brute_count(spec, sym_box(spec, 1), det_pred(a))
        assert count_det_value(spec, 1, a, 7).count == brute_count(spec, sym_box(spec, 1), det_pred(a, 7))


def test_rectangular_against_brute_force():
    spec = random_matrix_spec(9, 2, 3, 1, 4)
    for r in range(3):
        assert count_rank(spec, 1, r).count == brute_count(spec, sym_box(spec, 1), rank_pred(r))


def test_interval_override_against_brute_force():
    spec = random_matrix_spec(4, 2, 2, 2, 3)
    box = [range(1, 3), range(2, 5), range(-1, 1), range(3, 5)]
    iv = [(r.start, r.stop - 1) for r in box]
    for r in range(3):
        assert count_rank(spec, 2, r, intervals=iv).count == brute_count(spec, box, rank_pred(r))
    # dyadic box [H/2, H] applied to every variable
    dy = [range(2, 5)] * 4
    assert count_det_value(spec, 4, 0, intervals=[(2, 4)]).count == brute_count(spec, dy, det_pred(0))


def test_imm_counts_against_immanant():
    spec = random_matrix_spec(3, 3, 3, 1, 3)
    lam = Partition([2, 1])
    from itertools import product

    from matcount.polycore import eval_int
    from matcount.symrank import IntMatrix

    want = 0
    for xs in product(range(-1, 2), repeat=9):
        A = IntMatrix.from_rows([[eval_int(spec[i, j], xs[3 * i + j]) for j in range(3)] for i in range(3)])
        want += immanant(A, lam, 5) == 0
    assert count_imm_zero_mod_p(spec, 1, lam, 5).count == want


def test_imm_sign_equals_det_zero_mod_p():
    for seed in range(3):
        spec = random_matrix_spec(seed, 3, 3, 2, 4)
        assert count_imm_zero_mod_p(spec, 1, Partition.sign(3), 5).count == count_det_value(spec, 1, 0, 5).count


@pytest.mark.parametrize("m,n,H", [(2, 2, 1), (2, 3, 1), (3, 3, 1), (2, 2, 3)])
def test_rank_counts_partition_box(m, n, H):
    spec = random_matrix_spec(m * 10 + n, m, n, 2, 3)
    total = (2 * H + 1) ** (m * n)
    assert sum(count_rank(spec, H, r).count for r in range(min(m, n) + 1)) == total
    assert sum(count_rank(spec, H, r, 3).count for r in range(min(m, n) + 1)) == total


@pytest.mark.parametrize("p", [2, 3, 5])
def test_det_values_partition_box(p):
    spec = random_matrix_spec(p, 2, 2, 3, 5)
    assert sum(count_det_value(spec, 2, a, p).count for a in range(p)) == 5 ** 4


def test_rank_formula_small_cases():
    assert rank_count_formula(2, 2, 1, 3) == 32
    assert rank_count_formula(2, 2, 2, 3) == 48
    assert rank_count_formula(3, 3, 0, 7) == 1
    for m, n, q in [(2, 3, 2), (3, 3, 3), (3, 4, 5)]:
        assert sum(rank_count_formula(m, n, r, q) for r in range(min(m, n) + 1)) == q ** (m * n)
    assert invertible_count(3, 2) == 168


@pytest.mark.parametrize("n,p", [(1, 2), (1, 7), (2, 2), (2, 3), (2, 5), (2, 7), (3, 2), (3, 3), (3, 5)])
def test_singular_count_oracle(n, p):
    got = count_full_residue_zero(PolyMatrixSpec.linear(n), p).count
    assert got == p ** (n * n) - invertible_count(n, p)


def test_full_residue_intervals():
    assert full_residue_intervals(2) == ((0, 1),)
    assert full_residue_intervals(7) == ((-3, 3),)
    spec = PolyMatrixSpec.linear(2, 3)
    for p in (2, 3):
        for r in range(3):
            got = count_rank(spec, (p - 1) // 2, r, p, intervals=full_residue_intervals(p)).count
            assert got == rank_count_formula(2, 3, r, p)


@pytest.mark.parametrize("p", [3, 5])
def test_squares_singular_count_against_independent_oracle(p):
    spec = PolyMatrixSpec.monomial(3, 3, 2)
    assert count_full_residue_zero(spec, p).count == squares_singular_count(p)


def test_frozen_squares_counts():
    # values computed by the independent oracle above
    assert squares_singular_count(3) == 11763
    assert squares_singular_count(5) == 722405
    assert squares_singular_count(7) == 10243639


@pytest.mark.parametrize("shards", [1, 2, 8])
def test_shard_invariance(shards):
    spec = random_matrix_spec(11, 3, 3, 2, 3)
    base = count_det_value(spec, 1, 0, 5).count
    assert count_det_value(spec, 1, 0, 5, shards=shards).count == base
    q = CountQuery(spec, 1, "rank_eq_Q", r=2)
    assert run_count(q, shards=shards, workers=0).count == count_rank(spec, 1, 2).count


@settings(max_examples=25)
@given(st.integers(0, 50), st.integers(1, 5), st.integers(0, 2))
def test_sharded_sequential_matches(seed, shards, r):
    spec = random_matrix_spec(seed, 2, 2, 2, 4)
    q = CountQuery(spec, 2, "rank_eq_modp", r=r, p=7)
    assert run_count(q, shards=shards, workers=0).count == run_count(q).count


def test_large_entries_fall_back_to_exact_arithmetic():
    # entries up to 10^18 force the object-dtype path
    f = IntPoly([0, 0, 0, 0, 0, 0, 10**14])
    spec = PolyMatrixSpec([[f, [0, 1]], [[0, 1], f]])
    box = sym_box(spec, 2)
    assert count_det_value(spec, 2, 0).count == brute_count(spec, box, det_pred(0))
    assert count_rank(spec, 2, 1).count == brute_count(spec, box, rank_pred(1))


def test_low_rank_examples():
    mats, summary = generate_low_rank(LIN2, 1, 1, 50, seed=0)
    assert len(mats) == 50 and summary.accepted == 50
    assert all(M.to_rows()[0] == M.to_rows()[1] for M in mats)
    mats, _ = generate_low_rank(PolyMatrixSpec.linear(4), 3, 2, 10_000, seed=1)
    assert all(rank_rational(M) <= 2 for M in mats)
    mats, summary = generate_low_rank(PolyMatrixSpec.linear(3), 1, 3, 200, seed=2)
    assert all(rank_rational(M) == 3 for M in mats)
    assert 0 < summary.acceptance_ratio < 1


def test_low_rank_is_seeded():
    a, _ = generate_low_rank(PolyMatrixSpec.linear(3), 2, 2, 20, seed=5)
    b, _ = generate_low_rank(PolyMatrixSpec.linear(3), 2, 2, 20, seed=5)
    assert a == b


def test_low_rank_errors():
    with pytest.raises(ValueError):
        generate_low_rank(LIN2, 1, 3, 5, seed=0)
    # rows below r must repeat the first row's polynomials
    with pytest.raises(ValueError):
        list(iter_low_rank(random_matrix_spec(0, 3, 3, 2, 3), 1, 1, 5, seed=0))
