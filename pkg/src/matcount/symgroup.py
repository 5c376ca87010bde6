"""Symmetric-group characters and immanants.

Irreducible characters come from the Murnaghan-Nakayama rule, implemented
on beta-sets: removing a border strip of length k from a partition is the
same as sliding one bead of its beta-set k places down onto an empty spot,
with sign given by the parity of the beads jumped over.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Mapping, Sequence, Union

from .symrank import IntMatrix

MAX_PARTITION_N = 12
MAX_IMMANANT_N = 10
MAX_RYSER_N = 20


@dataclass(frozen=True, order=False)
class Partition:
    parts: tuple[int, ...]

    def __init__(self, parts: Sequence[int]):
        ps = tuple(int(x) for x in parts)
        if not ps or any(x <= 0 for x in ps):
            raise ValueError(f"partition parts must be positive and nonempty: {parts}")
        if any(ps[i] < ps[i + 1] for i in range(len(ps) - 1)):
            raise ValueError(f"partition parts must be non-increasing: {parts}")
        object.__setattr__(self, "parts", ps)

    @property
    def n(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"

    @classmethod
    def parse(cls, text: str) -> "Partition":
        """Parse ``"3,2,1"``, ``"(2,1)"`` or ``"1^4"`` style input."""
        t = text.strip().strip("()[] ")
        if "^" in t and "," not in t:
            a, b = t.split("^")
            return cls([int(a)] * int(b))
        return cls([int(x) for x in t.replace(" ", ",").split(",") if x])

    @classmethod
    def trivial(cls, n: int) -> "Partition":
        return cls([n])

    @classmethod
    def sign(cls, n: int) -> "Partition":
        return cls([1] * n)


def _partitions(n: int, largest: int) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


def partitions_of(n: int) -> list[Partition]:
    """All partitions of ``n`` in reverse-lexicographic order, ``(n)`` first."""
    if not 1 <= n <= MAX_PARTITION_N:
        raise ValueError(f"n must lie in [1, {MAX_PARTITION_N}], got {n}")
    return [Partition(p) for p in _partitions(n, n)]


def class_size(mu: Partition) -> int:
    """Number of permutations of cycle type ``mu``: n! / prod j^m_j m_j!."""
    denom = 1
    for j, mj in Counter(mu.parts).items():
        denom *= j ** mj * math.factorial(mj)
    return math.factorial(mu.n) // denom


def _beta_set(parts: tuple[int, ...]) -> tuple[int, ...]:
    ell = len(parts)
    return tuple(parts[i] + (ell - 1 - i) for i in range(ell))


def _from_beta(beta: Sequence[int]) -> tuple[int, ...]:
    b = sorted(beta, reverse=True)
    ell = len(b)
    parts = tuple(b[i] - (ell - 1 - i) for i in range(ell))
    return tuple(x for x in parts if x > 0)


@lru_cache(maxsize=None)
def _mn(lam: tuple[int, ...], mu: tuple[int, ...]) -> int:
    if not mu:
        return 1 if not lam else 0
    k, rest = mu[0], mu[1:]
    beta = _beta_set(lam)
    occupied = set(beta)
    total = 0
    for b in beta:
        t = b - k
        if t < 0 or t in occupied:
            continue
        jumped = sum(1 for x in beta if t < x < b)
        new = _from_beta([t if x == b else x for x in beta])
        val = _mn(new, rest)
        if val:
            total += -val if jumped % 2 else val
    return total


def character_mn(lam: Partition, mu: Partition) -> int:
    """Irreducible character value chi_lam at a permutation of cycle type mu."""
    if lam.n != mu.n:
        raise ValueError(f"partitions of different n: {lam.n} vs {mu.n}")
    if lam.n > MAX_PARTITION_N:
        raise ValueError(f"n must be <= {MAX_PARTITION_N}")
    return _mn(lam.parts, mu.parts)


@dataclass(frozen=True)
class CharacterTable:
    """Rows indexed by ``irreps`` (lambda), columns by ``classes`` (mu).

    Both lists use the reverse-lexicographic order of ``partitions_of``, so
    the first column is the class of ``n``-cycles and the last column is the
    identity class ``(1^n)``.
    """

    n: int
    classes: tuple[Partition, ...]
    sizes: tuple[int, ...]
    irreps: tuple[Partition, ...]
    values: tuple[tuple[int, ...], ...]

    @classmethod
    def build(cls, n: int) -> "CharacterTable":
        parts = tuple(partitions_of(n))
        sizes = tuple(class_size(mu) for mu in parts)
        values = tuple(tuple(character_mn(lam, mu) for mu in parts) for lam in parts)
        return cls(n, parts, sizes, parts, values)

    def row(self, lam: Partition) -> tuple[int, ...]:
        return self.values[self.irreps.index(lam)]

    def inner(self, u: Sequence[int], v: Sequence[int]) -> int:
        """``sum_C |C| u(C) v(C)``; equals n! times the usual inner product."""
        return sum(s * a * b for s, a, b in zip(self.sizes, u, v))

    def format(self) -> str:
        head = ["lambda \\ mu"] + [str(mu) for mu in self.classes]
        size_row = ["|class|"] + [str(s) for s in self.sizes]
        body = [[str(lam)] + [str(v) for v in row] for lam, row in zip(self.irreps, self.values)]
        table = [head, size_row] + body
        widths = [max(len(r[i]) for r in table) for i in range(len(head))]
        lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in table]
        lines.insert(2, "-" * len(lines[0]))
        return "\n".join(lines)


CharacterSpec = Union[Partition, Mapping[Partition, int]]


def class_function(character: CharacterSpec, n: int) -> dict[tuple[int, ...], int]:
    """Values of a character (irreducible, or integer combination of them)
    keyed by cycle type."""
    if isinstance(character, Partition):
        combo = {character: 1}
    else:
        combo = dict(character)
    for lam in combo:
        if lam.n != n:
            raise ValueError(f"character of S_{lam.n} used on an {n}x{n} matrix")
    out = {}
    for mu in partitions_of(n):
        out[mu.parts] = sum(c * character_mn(lam, mu) for lam, c in combo.items())
    return out


def immanant(A: IntMatrix, character: CharacterSpec, modulus: int | None = None) -> int:
    """``sum over sigma of chi(sigma) * prod_i A[i, sigma(i)]``.

    Permutations are generated depth-first, assigning ``sigma(0), sigma(1), ...``
    in turn.  Partial images form disjoint paths; each assignment either
    joins two paths or closes one into a cycle, so the cycle type is known at
    every leaf without factoring the permutation.
    """
    if not A.is_square:
        raise ValueError("immanant needs a square matrix")
    n = A.rows
    if n > MAX_IMMANANT_N:
        raise ValueError(f"immanant enumeration is capped at n <= {MAX_IMMANANT_N}")
    chi = class_function(character, n)
    # leaf lookup keyed by cycle-length multiplicities
    chi_by_mult = {}
    for parts, v in chi.items():
        mult = [0] * (n + 1)
        for x in parts:
            mult[x] += 1
        chi_by_mult[tuple(mult)] = v
    a = A.to_rows()
    if modulus is not None:
        a = [[v % modulus for v in row] for row in a]
    start = list(range(n))   # start[end] of the path ending at `end`
    end = list(range(n))     # end[start] of the path starting at `start`
    length = [1] * n         # keyed by path start
    used = [False] * n
    mult = [0] * (n + 1)
    total = 0

    def rec(i: int, prod: int) -> None:
        nonlocal total
        if i == n:
            total += chi_by_mult[tuple(mult)] * prod
            if modulus is not None:
                total %= modulus
            return
        s = start[i]
        row = a[i]
        for j in range(n):
            if used[j] or row[j] == 0:
                continue
            pr = prod * row[j]
            if modulus is not None:
                pr %= modulus
            used[j] = True
            if j == s:
                L = length[s]
                mult[L] += 1
                rec(i + 1, pr)
                mult[L] -= 1
            else:
                e = end[j]
                old_len, old_start_e, old_end_s = length[s], start[e], end[s]
                start[e] = s
                end[s] = e
                length[s] = old_len + length[j]
                rec(i + 1, pr)
                start[e], end[s], length[s] = old_start_e, old_end_s, old_len
            used[j] = False

    rec(0, 1)
    return total % modulus if modulus is not None else total


def permanent_ryser(A: IntMatrix) -> int:
    """Permanent by Ryser's formula, column subsets visited in Gray-code order."""
    if not A.is_square:
        raise ValueError("permanent needs a square matrix")
    n = A.rows
    if n > MAX_RYSER_N:
        raise ValueError(f"Ryser permanent is capped at n <= {MAX_RYSER_N}")
    if n == 0:
        return 1
    a = A.to_rows()
    rowsum = [0] * n
    total = 0
    prev_gray = 0
    size = 0
    for k in range(1, 1 << n):
        gray = k ^ (k >> 1)
        j = (gray ^ prev_gray).bit_length() - 1
        if gray & (1 << j):
            for i in range(n):
                rowsum[i] += a[i][j]
            size += 1
        else:
            for i in range(n):
                rowsum[i] -= a[i][j]
            size -= 1
        prev_gray = gray
        prod = 1
        for v in rowsum:
            prod *= v
            if not prod:
                break
        total += -prod if size % 2 else prod
    return -total if n % 2 else total
