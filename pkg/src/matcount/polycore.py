"""Univariate integer polynomials and matrices of them.

``IntPoly`` stores coefficients in ascending degree order, so ``coeffs[k]``
multiplies ``X**k``.  A ``PolyMatrixSpec`` is an ``m x n`` grid of them, one
polynomial per matrix entry, each in its own variable.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence


@dataclass(frozen=True)
class IntPoly:
    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int]):
        cs = [int(c) for c in coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs:
            cs = [0]
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def monomial(cls, d: int, c: int = 1) -> "IntPoly":
        return cls([0] * d + [c])

    @classmethod
    def x(cls) -> "IntPoly":
        return cls([0, 1])

    def is_zero(self) -> bool:
        return self.coeffs == (0,)

    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return -1 if self.is_zero() else len(self.coeffs) - 1

    def scale(self, c: int) -> "IntPoly":
        return IntPoly(c * a for a in self.coeffs)

    def norm(self) -> int:
        """Sum of absolute values of the coefficients."""
        return sum(abs(c) for c in self.coeffs)

    def __call__(self, x: int) -> int:
        return eval_int(self, x)

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("X" if k == 1 else f"X^{k}")
            if mono and c == 1:
                s = mono
            elif mono and c == -1:
                s = "-" + mono
            else:
                s = f"{c}*{mono}" if mono else str(c)
            parts.append(s)
        return " + ".join(parts).replace("+ -", "- ")


def eval_int(f: IntPoly, x: int) -> int:
    """Exact value ``f(x)`` by Horner's scheme."""
    acc = 0
    for c in reversed(f.coeffs):
        acc = acc * x + c
    return acc


def eval_mod(f: IntPoly, x: int, p: int) -> int:
    if p < 2:
        raise ValueError(f"modulus must be >= 2, got {p}")
    x %= p
    acc = 0
    for c in reversed(f.coeffs):
        acc = (acc * x + c) % p
    return acc


@dataclass(frozen=True)
class PolyMatrixSpec:
    m: int
    n: int
    entries: tuple[tuple[IntPoly, ...], ...]
    all_nonconstant: bool = field(init=False)

    def __init__(self, entries: Sequence[Sequence[IntPoly | Sequence[int]]]):
        rows = tuple(
            tuple(e if isinstance(e, IntPoly) else IntPoly(e) for e in row) for row in entries
        )
        if not rows or not rows[0]:
            raise ValueError("matrix spec needs m >= 1 and n >= 1")
        n = len(rows[0])
        if any(len(r) != n for r in rows):
            raise ValueError("ragged entry grid")
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "m", len(rows))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "all_nonconstant", all(e.degree() >= 1 for r in rows for e in r))

    @classmethod
    def uniform(cls, m: int, n: int, f: IntPoly) -> "PolyMatrixSpec":
        return cls([[f] * n for _ in range(m)])

    @classmethod
    def linear(cls, m: int, n: int | None = None) -> "PolyMatrixSpec":
        return cls.uniform(m, m if n is None else n, IntPoly.x())

    @classmethod
    def monomial(cls, m: int, n: int | None, d: int) -> "PolyMatrixSpec":
        return cls.uniform(m, m if n is None else n, IntPoly.monomial(d))

    @property
    def is_square(self) -> bool:
        return self.m == self.n

    def __getitem__(self, ij: tuple[int, int]) -> IntPoly:
        i, j = ij
        return self.entries[i][j]

    def flat(self) -> list[IntPoly]:
        return [e for row in self.entries for e in row]

    def max_degree(self) -> int:
        return max(e.degree() for e in self.flat())

    def min_degree(self) -> int:
        return min(e.degree() for e in self.flat())

    def require_nonconstant(self) -> None:
        if not self.all_nonconstant:
            raise ValueError("every entry polynomial must be non-constant")

    def to_json_obj(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "entries": [[list(e.coeffs) for e in row] for row in self.entries],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj: dict) -> "PolyMatrixSpec":
        spec = cls(obj["entries"])
        if spec.m != obj.get("m", spec.m) or spec.n != obj.get("n", spec.n):
            raise ValueError("declared m, n disagree with the entry grid")
        return spec

    @classmethod
    def from_json(cls, text: str) -> "PolyMatrixSpec":
        return cls.from_json_obj(json.loads(text))

    @classmethod
    def load(cls, path) -> "PolyMatrixSpec":
        with open(path) as fh:
            return cls.from_json_obj(json.load(fh))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_obj(), fh)


def random_matrix_spec(seed: int, m: int, n: int, degree: int, coeff_bound: int) -> PolyMatrixSpec:
    """Seeded random spec; every entry has exact degree ``degree``."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if coeff_bound < 1:
        raise ValueError("coeff_bound must be >= 1")
    rng = random.Random(seed)
    nonzero = [c for c in range(-coeff_bound, coeff_bound + 1) if c]
    rows = []
    for _ in range(m):
        row = []
        for _ in range(n):
            cs = [rng.randint(-coeff_bound, coeff_bound) for _ in range(degree)]
            cs.append(rng.choice(nonzero))
            row.append(IntPoly(cs))
        rows.append(row)
    return PolyMatrixSpec(rows)


@dataclass(frozen=True)
class BigPower:
    """``base ** exponent`` kept unevaluated.

    ``exponent`` is either an int or another ``BigPower`` when even the
    exponent is too large to write down.
    """

    base: int
    exponent: "int | BigPower"

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("base must be >= 2")
        if isinstance(self.exponent, int) and self.exponent < 1:
            raise ValueError("exponent must be >= 1")

    @property
    def symbolic(self) -> bool:
        return isinstance(self.exponent, BigPower)

    def loglog(self) -> float:
        """``log(log(value))``; finite for every tower built here."""
        e = self.exponent
        if isinstance(e, BigPower):
            le = e.loglog()
            log_e = math.exp(le) if le < 700 else math.inf
        else:
            log_e = math.log(e)
        return log_e + math.log(math.log(self.base))

    def _cmp(self, other: "BigPower") -> int:
        if not self.symbolic and not other.symbolic:
            # exact when both fit comfortably in memory
            if max(self.exponent * self.base.bit_length(), other.exponent * other.base.bit_length()) < 1 << 20:
                a, b = self.base**self.exponent, other.base**other.exponent
                return (a > b) - (a < b)
        la, lb = self.loglog(), other.loglog()
        return (la > lb) - (la < lb)

    def __lt__(self, other: "BigPower") -> bool:
        return self._cmp(other) < 0

    def __le__(self, other: "BigPower") -> bool:
        return self._cmp(other) <= 0

    def __str__(self) -> str:
        return f"{self.base}^({self.exponent})"


# M**(2**M) is materialized only below this many bits.
MATERIALIZE_BITS = 1 << 20


def ostrowski_threshold(norm: int, k: int, d: int) -> BigPower:
    """Prime threshold ``(4*norm) ** (M ** (2**M))`` with ``M = C(k+d-1, k)``.

    The outer power is never evaluated.  The exponent ``M ** (2**M)`` is an
    exact int while it has at most ``MATERIALIZE_BITS`` bits (``M <= 17``);
    beyond that it is returned as a nested ``BigPower(M, 2**M)``.  Check
    ``.symbolic`` to see which form came back.
    """
    if norm < 1:
        raise ValueError("norm must be >= 1")
    if k < 1 or d < 1:
        raise ValueError("k and d must be >= 1")
    M = math.comb(k + d - 1, k)
    if M == 1:
        return BigPower(4 * norm, 1)
    if (1 << M) * M.bit_length() <= MATERIALIZE_BITS:
        return BigPower(4 * norm, M ** (1 << M))
    return BigPower(4 * norm, BigPower(M, 1 << M))


def ostrowski_M(k: int, d: int) -> int:
    return math.comb(k + d - 1, k)
