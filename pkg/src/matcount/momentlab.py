"""Moments of Weyl-type sums and additive equations in a box.

For even ``k`` the moment ``I_k(f, H)`` counts solutions of
``f(x_1)+...+f(x_{k/2}) = f(y_1)+...+f(y_{k/2})`` with all variables in
``[-H, H]``, so it is computed exactly from the value distribution of ``f``:
convolve it ``k/2`` times and sum the squared counts.  ``J_k(f, H, p)`` is
the same with equality mod ``p``.

Distributions are kept as a pair of sorted numpy arrays ``(values, counts)``
while every attainable sum fits in int64, and fall back to a plain dict of
Python ints otherwise.
"""
from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .polycore import IntPoly, eval_int

DEFAULT_BUDGET = 10**9
# distinct keys allowed in one convolution stage
DEFAULT_KEY_BUDGET = 2 * 10**8
_I64 = 1 << 62


class BudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class ValueDistribution:
    """Exact multiset ``{value: count}``; ``modulus`` is None over Z."""

    values: np.ndarray
    counts: np.ndarray
    modulus: int | None = None

    @classmethod
    def from_dict(cls, d: dict, modulus: int | None = None) -> "ValueDistribution":
        keys = sorted(k for k, c in d.items() if c)
        vals = [d[k] for k in keys]
        return cls(_array(keys), _array(vals), modulus)

    def as_dict(self) -> dict[int, int]:
        return {int(v): int(c) for v, c in zip(self.values, self.counts)}

    @property
    def total(self) -> int:
        return int(sum(int(c) for c in self.counts)) if self.counts.dtype == object else int(self.counts.sum())

    def __len__(self) -> int:
        return len(self.values)

    def max_abs(self) -> int:
        return max(abs(int(self.values[0])), abs(int(self.values[-1]))) if len(self) else 0

    def negate(self) -> "ValueDistribution":
        if self.modulus is None:
            return ValueDistribution(-self.values[::-1], self.counts[::-1], None)
        return ValueDistribution.from_dict({(-v) % self.modulus: c for v, c in self.as_dict().items()},
                                           self.modulus)

    def scale(self, a: int) -> "ValueDistribution":
        if a == 0:
            raise ValueError("scaling by zero collapses the distribution")
        if self.modulus is None:
            vals = self.values * a
            if a < 0:
                return ValueDistribution(vals[::-1], self.counts[::-1], None)
            return ValueDistribution(vals, self.counts, None)
        out: dict[int, int] = {}
        for v, c in self.as_dict().items():
            k = v * a % self.modulus
            out[k] = out.get(k, 0) + c
        return ValueDistribution.from_dict(out, self.modulus)

    def __eq__(self, other) -> bool:
        return isinstance(other, ValueDistribution) and self.modulus == other.modulus \
            and self.as_dict() == other.as_dict()


def _array(xs) -> np.ndarray:
    xs = list(xs)
    if all(-_I64 < int(x) < _I64 for x in xs):
        return np.array(xs, dtype=np.int64)
    return np.array(xs, dtype=object)


def _check_box(H: int, budget: int) -> None:
    if H < 0:
        raise ValueError("H must be >= 0")
    if 2 * H + 1 > budget:
        raise BudgetExceeded(f"box of {2 * H + 1} points exceeds budget {budget}")


def value_distribution(f: IntPoly, H: int, modulus: int | None = None,
                       budget: int = DEFAULT_BUDGET) -> ValueDistribution:
    """Multiset of ``f(x)`` (or ``f(x) mod p``) for ``x`` in ``[-H, H]``."""
    _check_box(H, budget)
    d: dict[int, int] = {}
    for x in range(-H, H + 1):
        v = eval_int(f, x)
        if modulus is not None:
            v %= modulus
        d[v] = d.get(v, 0) + 1
    return ValueDistribution.from_dict(d, modulus)


def convolve(A: ValueDistribution, B: ValueDistribution,
             key_budget: int = DEFAULT_KEY_BUDGET, stage: str = "") -> ValueDistribution:
    """Distribution of ``a + b`` (mod p when both are mod p)."""
    if A.modulus != B.modulus:
        raise ValueError("cannot convolve distributions over different rings")
    p = A.modulus
    if p is not None:
        return _cyclic_convolve(A, B, p)
    pairs = len(A) * len(B)
    if pairs > key_budget:
        raise BudgetExceeded(
            f"convolution stage {stage or '?'} needs {pairs} pair sums, key budget is {key_budget}")
    fast = (A.values.dtype != object and B.values.dtype != object
            and A.max_abs() + B.max_abs() < _I64
            and A.counts.dtype != object and B.counts.dtype != object
            and A.total * B.total < _I64)
    if fast:
        sums = np.add.outer(A.values, B.values).ravel()
        weights = np.multiply.outer(A.counts, B.counts).ravel()
        order = np.argsort(sums, kind="stable")
        sums, weights = sums[order], weights[order]
        starts = np.flatnonzero(np.r_[True, sums[1:] != sums[:-1]])
        return ValueDistribution(sums[starts], np.add.reduceat(weights, starts), None)
    out: dict[int, int] = {}
    bd = B.as_dict()
    for a, ca in A.as_dict().items():
        for b, cb in bd.items():
            out[a + b] = out.get(a + b, 0) + ca * cb
    return ValueDistribution.from_dict(out, None)


def _dense(A: ValueDistribution, p: int) -> list[int]:
    vec = [0] * p
    for v, c in A.as_dict().items():
        vec[v % p] += c
    return vec


def _cyclic_convolve(A: ValueDistribution, B: ValueDistribution, p: int) -> ValueDistribution:
    a, b = _dense(A, p), _dense(B, p)
    if A.total * B.total < _I64 and p <= 1 << 20:
        av = np.array(a, dtype=np.int64)
        bv = np.array(b, dtype=np.int64)
        full = np.convolve(av, bv)
        res = full[:p].copy()
        res[: len(full) - p] += full[p:]
        return ValueDistribution.from_dict({i: int(c) for i, c in enumerate(res) if c}, p)
    out = [0] * p
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                if cb:
                    out[(i + j) % p] += ca * cb
    return ValueDistribution.from_dict({i: c for i, c in enumerate(out) if c}, p)


def power_distribution(D: ValueDistribution, j: int, key_budget: int = DEFAULT_KEY_BUDGET) -> ValueDistribution:
    """``j``-fold sum distribution of ``D``."""
    if j < 1:
        raise ValueError("need j >= 1")
    out = D
    for stage in range(2, j + 1):
        out = convolve(out, D, key_budget, stage=f"{stage}-fold sum")
    return out


def sum_of_squares(D: ValueDistribution) -> int:
    if D.counts.dtype != object and D.total < 1 << 31:
        return int(np.dot(D.counts, D.counts))
    return sum(int(c) * int(c) for c in D.counts)


@dataclass(frozen=True)
class MomentResult:
    quantity: str
    k: int
    H: int
    p: int | None
    value: Fraction | float
    method: str
    error_bound: float = 0.0
    elapsed: float = 0.0

    @property
    def exact(self) -> bool:
        return isinstance(self.value, Fraction)


def even_moment_I(f: IntPoly, H: int, k: int, key_budget: int = DEFAULT_KEY_BUDGET) -> MomentResult:
    """``I_k(f, H)`` for even ``k``: sum of squared ``k/2``-fold sum counts."""
    if k < 2 or k % 2:
        raise ValueError(f"k must be even and >= 2, got {k}")
    t0 = time.perf_counter()
    D = value_distribution(f, H)
    R = power_distribution(D, k // 2, key_budget)
    val = sum_of_squares(R)
    return MomentResult("I", k, H, None, Fraction(val), "convolution", 0.0, time.perf_counter() - t0)


def diophantine_count(fs: Sequence[IntPoly], a: Sequence[int], H: int,
                      key_budget: int = DEFAULT_KEY_BUDGET) -> int:
    """Solutions of ``sum a_i f_i(x_i) = 0`` with every ``x_i`` in ``[-H, H]``.

    Meet in the middle: the sums over the first ``ceil(k/2)`` variables are
    matched against the negated sums over the rest.
    """
    k = len(fs)
    if k != len(a):
        raise ValueError("need one coefficient per polynomial")
    if k < 2:
        raise ValueError("need k >= 2")
    if any(c == 0 for c in a):
        raise ValueError("every coefficient a_i must be nonzero")
    dists = [value_distribution(f, H).scale(c) for f, c in zip(fs, a)]
    half = (k + 1) // 2
    left = dists[0]
    for D in dists[1:half]:
        left = convolve(left, D, key_budget, stage="left half")
    right = dists[half]
    for D in dists[half + 1:]:
        right = convolve(right, D, key_budget, stage="right half")
    return match_negated(left, right)


def match_negated(left: ValueDistribution, right: ValueDistribution) -> int:
    """``sum_v left[v] * right[-v]``."""
    neg = right.negate()
    if left.values.dtype != object and neg.values.dtype != object:
        common, li, ri = np.intersect1d(left.values, neg.values, assume_unique=True, return_indices=True)
        if len(common) == 0:
            return 0
        lc, rc = left.counts[li], neg.counts[ri]
        if left.total * right.total < _I64 and lc.dtype != object and rc.dtype != object:
            return int(np.dot(lc, rc))
        return sum(int(x) * int(y) for x, y in zip(lc, rc))
    rd = neg.as_dict()
    return sum(c * rd.get(v, 0) for v, c in left.as_dict().items())


def exponential_sums(f: IntPoly, H: int, p: int) -> np.ndarray:
    """``S(alpha) = sum_x e_p(alpha f(x))`` for every ``alpha`` in ``0..p-1``.

    Evaluated as a fixed-order DFT of the mod-p value distribution, so
    repeated calls give bit-identical results.
    """
    vec = np.array(_dense(value_distribution(f, H, p), p), dtype=np.float64)
    # sum_v c_v e(alpha v / p) == p * ifft(c)[alpha]
    return np.fft.ifft(vec) * p


def moment_J(f: IntPoly, H: int, p: int, k: int, budget: int = DEFAULT_BUDGET) -> MomentResult:
    """``J_k(f, H, p) = (1/p) sum_alpha |S(alpha)|^k``.

    Even ``k`` is exact: the count of ``sum f(x_i) = sum f(y_i) mod p``.
    Odd ``k`` is a float from the explicit grid of sums, reported with the
    conservative rounding bound ``k * (2H+1) * p * ulp`` scaled by the value.
    """
    if p < 2:
        raise ValueError("p must be >= 2")
    if 2 * H + 1 > p:
        raise ValueError(f"box of {2 * H + 1} points aliases modulo p = {p}")
    if k < 1:
        raise ValueError("k must be >= 1")
    t0 = time.perf_counter()
    if k % 2 == 0:
        D = value_distribution(f, H, p)
        R = power_distribution(D, k // 2)
        val = Fraction(sum_of_squares(R))
        return MomentResult("J", k, H, p, val, "cyclic-convolution", 0.0, time.perf_counter() - t0)
    if p * (2 * H + 1) > budget:
        raise BudgetExceeded(f"grid of {p} sums over {2 * H + 1} points exceeds budget {budget}")
    val, err = j_moment_grid(f, H, p, k)
    return MomentResult("J", k, H, p, val, "complex-grid", err, time.perf_counter() - t0)


def j_moment_grid(f: IntPoly, H: int, p: int, k: int) -> tuple[float, float]:
    """``(1/p) sum |S(alpha)|^k`` by floating point, with an error bound."""
    S = exponential_sums(f, H, p)
    mags = np.abs(S) ** k
    val = float(math.fsum(mags.tolist()) / p)
    err = k * (2 * H + 1) * p * sys.float_info.epsilon * max(val, 1.0)
    return val, err


def slope_estimate(points: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of ``log(count)`` against ``log(H)``."""
    pts = list(points)
    if len(pts) < 2:
        raise ValueError("need at least two points")
    Hs = [float(h) for h, _ in pts]
    cs = [float(c) for _, c in pts]
    if any(c <= 0 for c in cs) or any(h <= 0 for h in Hs):
        raise ValueError("H and counts must be positive")
    if any(b <= a for a, b in zip(Hs, Hs[1:])):
        raise ValueError("H must be strictly increasing")
    x = np.log(Hs)
    y = np.log(cs)
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def brute_force_moment(f: IntPoly, H: int, k: int, p: int | None = None) -> int:
    """Direct count of ``sum f(x_i) = sum f(y_i)`` over all ``(2H+1)^k`` tuples."""
    import itertools

    if k % 2:
        raise ValueError("k must be even")
    j = k // 2
    vals = [eval_int(f, x) for x in range(-H, H + 1)]
    total = 0
    for xs in itertools.product(vals, repeat=j):
        lhs = sum(xs)
        for ys in itertools.product(vals, repeat=j):
            d = lhs - sum(ys)
            if (d == 0) if p is None else (d % p == 0):
                total += 1
    return total
