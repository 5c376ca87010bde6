import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from matcount.momentlab import (
    ValueDistribution,
    brute_force_moment,
    convolve,
    diophantine_count,
    even_moment_I,
    j_moment_grid,
    moment_J,
    power_distribution,
    slope_estimate,
    value_distribution,
)
from matcount.polycore import IntPoly, eval_int

X = IntPoly.x()
X2 = IntPoly.monomial(2)
X3 = IntPoly.monomial(3)


def test_value_distribution_examples():
    assert value_distribution(X2, 1).as_dict() == {0: 1, 1: 2}
    assert value_distribution(X3, 1).as_dict() == {-1: 1, 0: 1, 1: 1}
    assert value_distribution(IntPoly([1, 2]), 1).as_dict() == {-1: 1, 1: 1, 3: 1}
    assert value_distribution(X2, 2, 5).as_dict() == {0: 1, 1: 2, 4: 2}


def test_even_moment_examples():
    for H in (1, 4, 9):
        assert even_moment_I(X3, H, 2).value == 2 * H + 1
    assert even_moment_I(X, 1, 4).value == 19
    assert even_moment_I(X2, 1, 4).value == 33
    res = even_moment_I(X, 5, 4)
    assert res.exact and isinstance(res.value, Fraction)
    with pytest.raises(ValueError):
        even_moment_I(X, 1, 3)


def closed_i4(H):
    N = 2 * H + 1
    return N * (2 * N * N + 1) // 3


def test_i4_linear_closed_form():
    for H in range(0, 9):
        assert brute_force_moment(X, H, 4) == closed_i4(H)
    for H in range(0, 101):
        assert even_moment_I(X, H, 4).value == closed_i4(H)


@pytest.mark.parametrize("f", [X, X2, X3, IntPoly([1, -2, 0, 1])])
def test_even_moment_against_brute_force(f):
    for H in range(0, 9):
        for k in (2, 4):
            assert even_moment_I(f, H, k).value == brute_force_moment(f, H, k)


def test_i8_against_brute_force_small():
    for H in (0, 1, 2):
        assert even_moment_I(X2, H, 8).value == brute_force_moment(X2, H, 8)


def test_log_convexity():
    for f in (X, X2, X3):
        for H in (3, 7, 12):
            i2, i4, i6 = (int(even_moment_I(f, H, k).value) for k in (2, 4, 6))
            assert i4 * i4 <= i2 * i6


def test_diophantine_examples():
    assert diophantine_count([X2, X2], [1, -1], 1) == 5
    assert diophantine_count([X, X, X], [1, 1, 1], 1) == 7
    assert diophantine_count([X, X], [2, -2], 1) == 3
    with pytest.raises(ValueError):
        diophantine_count([X, X], [1, 0], 1)


def brute_diophantine(fs, a, H):
    return sum(1 for xs in itertools.product(range(-H, H + 1), repeat=len(fs))
               if sum(c * eval_int(f, x) for f, c, x in zip(fs, a, xs)) == 0)


@settings(max_examples=40)
@given(
    st.lists(st.sampled_from([X, X2, X3, IntPoly([1, 1]), IntPoly([0, -1, 1])]), min_size=2, max_size=4),
    st.data(),
    st.integers(0, 3),
)
def test_diophantine_against_brute_force(fs, data, H):
    a = data.draw(st.lists(st.integers(-3, 3).filter(bool), min_size=len(fs), max_size=len(fs)))
    assert diophantine_count(fs, a, H) == brute_diophantine(fs, a, H)


def test_diophantine_matches_i2():
    for f in (X, X2, X3):
        for H in (2, 6):
            assert diophantine_count([f, f], [1, -1], H) == even_moment_I(f, H, 2).value


def test_moment_J_examples():
    assert moment_J(X2, 2, 5, 2).value == 9
    for H, p in ((0, 3), (2, 7), (5, 11)):
        assert moment_J(X, H, p, 2).value == 2 * H + 1
    for p in (5, 7, 11):
        assert moment_J(X, (p - 1) // 2, p, 4).value == p ** 3
    with pytest.raises(ValueError):
        moment_J(X, 3, 5, 2)


def test_moment_J_even_matches_grid():
    for p in (3, 11, 53, 101):
        for H in sorted({0, 1, (p - 1) // 4, (p - 1) // 2}):
            H = min(H, 50)
            for k in (2, 4):
                for f in (X2, X3):
                    exact = float(moment_J(f, H, p, k).value)
                    grid, _ = j_moment_grid(f, H, p, k)
                    assert abs(grid - exact) <= 1e-6 * max(1.0, exact)


def test_moment_J_odd_k_is_float_with_bound():
    res = moment_J(X2, 3, 11, 3)
    assert not res.exact
    assert res.error_bound > 0
    again = moment_J(X2, 3, 11, 3)
    assert res.value == again.value


def test_J_equals_I_without_wraparound():
    for f in (X, X2, X3):
        for H in range(0, 11):
            top = max(abs(eval_int(f, x)) for x in range(-H, H + 1))
            p = next(q for q in range(max(8 * top + 1, 2 * H + 1, 2), 10**6) if all(q % d for d in range(2, int(q ** 0.5) + 1)))
            assert moment_J(f, H, p, 4).value == even_moment_I(f, H, 4).value


def test_convolution_totals_multiply():
    A = value_distribution(X3, 7)
    B = value_distribution(IntPoly([2, 0, -1]), 4)
    C = convolve(A, B)
    assert C.total == A.total * B.total
    assert power_distribution(A, 3).total == A.total ** 3


def test_distribution_dict_fallback_matches():
    big = IntPoly([0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 10**5])
    D = value_distribution(big, 30)
    R = power_distribution(D, 2)
    want = {}
    vals = [eval_int(big, x) for x in range(-30, 31)]
    for u in vals:
        for v in vals:
            want[u + v] = want.get(u + v, 0) + 1
    assert R.as_dict() == want


def test_slope_examples():
    assert slope_estimate([(10, 100), (100, 10000)]) == pytest.approx(2.0)
    assert slope_estimate([(10, 10), (100, 100), (1000, 1000)]) == pytest.approx(1.0)
    assert slope_estimate([(H, 7 * H ** 3) for H in (3, 9, 27)]) == pytest.approx(3.0, abs=1e-9)
    with pytest.raises(ValueError):
        slope_estimate([(10, 1)])
    with pytest.raises(ValueError):
        slope_estimate([(10, 1), (5, 3)])
    with pytest.raises(ValueError):
        slope_estimate([(10, 0), (20, 3)])


def test_value_distribution_equality():
    a = ValueDistribution.from_dict({1: 2, 0: 1})
    assert a == value_distribution(X2, 1)
