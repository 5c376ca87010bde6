import itertools
import random

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from matcount.symbolic import MultiPoly, leibniz_det
from matcount.symrank import (
    IntMatrix,
    batch_det,
    batch_det_mod,
    batch_rank,
    det,
    rank_mod_p,
    rank_rational,
)

M = IntMatrix.from_rows


def test_rank_examples():
    assert rank_rational(IntMatrix.identity(4)) == 4
    assert rank_rational(M([[1] * 3] * 3)) == 1
    assert rank_rational(M([[1, 2], [2, 4]])) == 1
    assert rank_rational(M([[0, 0], [0, 0]])) == 0


def test_rank_mod_p_examples():
    assert rank_mod_p(M([[1, 2], [2, 4]]), 5) == 1
    assert rank_mod_p(M([[7, 0], [0, 7]]), 7) == 0
    assert rank_mod_p(M([[1, 0], [0, 1]]), 2) == 2
    with pytest.raises(ValueError):
        rank_mod_p(IntMatrix.identity(2), 1)


def test_det_examples():
    assert det(M([[2, 3], [1, 4]])) == 5
    assert det(IntMatrix.identity(5)) == 1
    assert det(M([[2, 3], [1, 4]]), 3) == 2
    with pytest.raises(ValueError):
        det(M([[1, 2, 3]]))


def test_rank_mod_p_at_most_rational_rank():
    rng = random.Random(0)
    for _ in range(1000):
        A = M([[rng.randint(-50, 50) for _ in range(4)] for _ in range(4)])
        r = rank_rational(A)
        mods = [rank_mod_p(A, p) for p in (10007, 10009, 10037)]
        assert all(x <= r for x in mods)
        assert r in mods


def test_det_nonzero_iff_full_rank():
    rng = random.Random(1)
    for _ in range(1000):
        n = rng.randint(1, 5)
        A = M([[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)])
        assert (det(A) != 0) == (rank_rational(A) == n)


@pytest.mark.parametrize("n", [2, 3])
def test_det_matches_leibniz_oracle(n):
    # every matrix when n = 2, a fixed sample of the 5^9 when n = 3
    vals = range(-2, 3)
    if n == 2:
        cases = itertools.product(vals, repeat=4)
    else:
        rng = random.Random(2)
        cases = (tuple(rng.choice(vals) for _ in range(9)) for _ in range(5000))
    for e in cases:
        rows = [list(e[i * n:(i + 1) * n]) for i in range(n)]
        oracle = leibniz_det([[MultiPoly.const(v) for v in row] for row in rows])
        assert det(M(rows)) == oracle.evaluate({})


@given(st.integers(1, 5), st.integers(1, 5), st.data())
def test_rank_matches_sympy(r, c, data):
    rows = data.draw(st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=r, max_size=r))
    assert rank_rational(M(rows)) == sympy.Matrix(rows).rank()


@given(st.integers(1, 5), st.sampled_from([2, 3, 5, 7, 101]), st.data())
def test_det_mod_matches_sympy(n, p, data):
    rows = data.draw(st.lists(st.lists(st.integers(-30, 30), min_size=n, max_size=n), min_size=n, max_size=n))
    assert det(M(rows), p) == int(sympy.Matrix(rows).det()) % p
    assert det(M(rows)) == int(sympy.Matrix(rows).det())


def test_batched_kernels_agree_with_scalar():
    rng = np.random.default_rng(3)
    for n in (1, 2, 3, 4, 5):
        stack = rng.integers(-9, 10, size=(300, n, n))
        dets = batch_det(stack)
        ranks = batch_rank(stack)
        for p in (2, 3, 7, 10007):
            dm = batch_det_mod(stack, p)
            rm = batch_rank(stack, p)
            for k in range(0, 300, 7):
                A = M(stack[k].tolist())
                assert int(dm[k]) == det(A, p)
                assert int(rm[k]) == rank_mod_p(A, p)
        for k in range(300):
            A = M(stack[k].tolist())
            assert int(dets[k]) == det(A)
            assert int(ranks[k]) == rank_rational(A)


def test_batched_rank_rectangular_and_big_entries():
    rng = random.Random(4)
    rows = [[[rng.randint(-10**12, 10**12) for _ in range(5)] for _ in range(3)] for _ in range(50)]
    stack = np.array(rows, dtype=object)
    got = batch_rank(stack)
    for k in range(50):
        assert int(got[k]) == rank_rational(M(rows[k]))
    # rank-deficient by construction
    low = np.array([[r, r, [2 * x for x in r]] for r in (row[0] for row in rows)], dtype=object)
    assert set(int(x) for x in batch_rank(low)) == {1}
