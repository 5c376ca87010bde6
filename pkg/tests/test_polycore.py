import json

import pytest
from hypothesis import given, strategies as st

from matcount.polycore import (
    BigPower,
    IntPoly,
    PolyMatrixSpec,
    eval_int,
    eval_mod,
    ostrowski_M,
    ostrowski_threshold,
    random_matrix_spec,
)


def test_intpoly_normalizes_trailing_zeros():
    assert IntPoly([1, 2, 0, 0]).coeffs == (1, 2)
    assert IntPoly([]).coeffs == (0,)
    assert IntPoly([0, 0]).is_zero()
    assert IntPoly([0]).degree() == -1
    assert IntPoly([3, 0, 5]).degree() == 2


def test_eval_int_examples():
    assert eval_int(IntPoly.monomial(3), 2) == 8
    assert eval_int(IntPoly([1, 0, 2]), -3) == 19
    assert eval_int(IntPoly([0]), 7) == 0


def test_eval_mod_examples():
    assert eval_mod(IntPoly.monomial(2), 3, 5) == 4
    assert eval_mod(IntPoly.x(), 17, 5) == 2
    assert eval_mod(IntPoly([0, 1, 0, 1]), 2, 3) == 1


def test_eval_mod_rejects_small_modulus():
    with pytest.raises(ValueError):
        eval_mod(IntPoly.x(), 1, 1)


@given(
    st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=6),
    st.integers(-10**6, 10**6),
    st.integers(2, 10**4),
)
def test_eval_int_reduces_to_eval_mod(coeffs, x, p):
    f = IntPoly(c % p for c in coeffs)
    assert eval_int(f, x) % p == eval_mod(f, x % p, p)


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=6), st.integers(-20, 20).filter(bool))
def test_scaling_preserves_degree(coeffs, c):
    f = IntPoly(coeffs)
    assert f.scale(c).degree() == f.degree()


def test_norm_is_sum_of_absolute_values():
    assert IntPoly([1, -2, 3]).norm() == 6


def test_spec_constructors_and_flag():
    lin = PolyMatrixSpec.linear(2, 3)
    assert (lin.m, lin.n) == (2, 3)
    assert lin.all_nonconstant
    assert not PolyMatrixSpec([[[1], [0, 1]]]).all_nonconstant
    with pytest.raises(ValueError):
        PolyMatrixSpec([[[0, 1]], [[0, 1], [0, 1]]])
    with pytest.raises(ValueError):
        PolyMatrixSpec([])


def test_require_nonconstant_rejects_constants():
    with pytest.raises(ValueError):
        PolyMatrixSpec([[[5]]]).require_nonconstant()


def test_json_round_trip(tmp_path):
    spec = random_matrix_spec(7, 2, 3, 2, 4)
    obj = json.loads(spec.to_json())
    assert set(obj) == {"m", "n", "entries"}
    assert obj["m"] == 2 and obj["n"] == 3
    assert PolyMatrixSpec.from_json(spec.to_json()) == spec
    path = tmp_path / "spec.json"
    spec.save(path)
    assert PolyMatrixSpec.load(path) == spec


def test_random_spec_is_deterministic():
    assert random_matrix_spec(5, 3, 3, 2, 3) == random_matrix_spec(5, 3, 3, 2, 3)


def test_random_spec_degree_and_bounds():
    spec = random_matrix_spec(1, 3, 3, 2, 3)
    assert all(f.degree() == 2 for f in spec.flat())
    assert all(abs(c) <= 3 for f in spec.flat() for c in f.coeffs)
    assert spec.all_nonconstant


def test_random_spec_seeds_differ():
    assert all(random_matrix_spec(s, 3, 3, 2, 3) != random_matrix_spec(s + 1000, 3, 3, 2, 3)
               for s in range(100))


def test_random_spec_rejects_degree_zero():
    with pytest.raises(ValueError):
        random_matrix_spec(0, 2, 2, 0, 3)


def test_ostrowski_examples():
    assert ostrowski_M(2, 2) == 3
    t = ostrowski_threshold(2, 2, 1)
    assert (t.base, t.exponent) == (8, 1)
    t = ostrowski_threshold(1, 2, 2)
    assert (t.base, t.exponent) == (4, 6561)
    assert not t.symbolic


def test_ostrowski_switches_to_nested_form():
    t = ostrowski_threshold(1, 3, 4)  # M = 20
    assert t.symbolic
    assert t.exponent == BigPower(20, 1 << 20)
    with pytest.raises(ValueError):
        ostrowski_threshold(0, 2, 2)


def test_ostrowski_monotone():
    values = [(norm, k, d) for norm in (1, 2, 5) for k in (1, 2, 3) for d in (1, 2, 3, 4)]
    for norm, k, d in values:
        t = ostrowski_threshold(norm, k, d)
        assert t <= ostrowski_threshold(norm + 1, k, d)
        assert t <= ostrowski_threshold(norm, k + 1, d)
        assert t <= ostrowski_threshold(norm, k, d + 1)


def test_bigpower_exact_comparison():
    assert BigPower(2, 10) < BigPower(3, 7)
    assert not BigPower(3, 7) < BigPower(2, 10)
    assert BigPower(4, 3) <= BigPower(8, 2)
