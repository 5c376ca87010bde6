"""Sparse multivariate integer polynomials and the determinant identities
built from them.

A ``MultiPoly`` keeps a registry of variable names and a map from exponent
vectors (aligned with the registry) to nonzero integer coefficients.  Matrix
variables are named ``X11, X12, ...`` (1-based row then column); the
homogenizing variable is ``Z`` and always sorts last.
"""
from __future__ import annotations

import itertools
import math
from typing import Mapping, Sequence

from .polycore import IntPoly, PolyMatrixSpec
from .symrank import IntMatrix, det

MAX_DET_N = 5
MAX_MINOR_N = 4
HOMOGENIZER = "Z"


def _var_key(name: str):
    return (name == HOMOGENIZER, len(name), name)


def entry_var(i: int, j: int) -> str:
    """Name of the variable in entry ``(i, j)`` (0-based input)."""
    return f"X{i + 1}{j + 1}" if max(i, j) < 9 else f"X{i + 1}_{j + 1}"


class MultiPoly:
    __slots__ = ("vars", "terms")

    def __init__(self, variables: Sequence[str] = (), terms: Mapping[tuple[int, ...], int] | None = None):
        vs = tuple(variables)
        if len(set(vs)) != len(vs):
            raise ValueError(f"duplicate variables: {vs}")
        order = sorted(range(len(vs)), key=lambda k: _var_key(vs[k]))
        self.vars = tuple(vs[k] for k in order)
        self.terms: dict[tuple[int, ...], int] = {}
        for e, c in (terms or {}).items():
            if len(e) != len(vs):
                raise ValueError("exponent vector does not match the variable registry")
            if any(x < 0 for x in e):
                raise ValueError("negative exponent")
            if c:
                key = tuple(e[k] for k in order)
                self.terms[key] = self.terms.get(key, 0) + int(c)
        self.terms = {e: c for e, c in self.terms.items() if c}

    # -- constructors
    @classmethod
    def const(cls, c: int) -> "MultiPoly":
        return cls((), {(): c})

    @classmethod
    def var(cls, name: str) -> "MultiPoly":
        return cls((name,), {(1,): 1})

    @classmethod
    def univariate(cls, name: str, f: IntPoly) -> "MultiPoly":
        return cls((name,), {(k,): c for k, c in enumerate(f.coeffs)})

    # -- registry alignment
    def _embed(self, variables: tuple[str, ...]) -> dict[tuple[int, ...], int]:
        pos = [variables.index(v) for v in self.vars]
        out = {}
        for e, c in self.terms.items():
            full = [0] * len(variables)
            for k, x in zip(pos, e):
                full[k] = x
            out[tuple(full)] = c
        return out

    @staticmethod
    def _union(a: "MultiPoly", b: "MultiPoly") -> tuple[str, ...]:
        return tuple(sorted(set(a.vars) | set(b.vars), key=_var_key))

    def used_vars(self) -> tuple[str, ...]:
        return tuple(v for k, v in enumerate(self.vars) if any(e[k] for e in self.terms))

    def trimmed(self) -> "MultiPoly":
        """Same polynomial with unused variables dropped from the registry."""
        keep = [k for k, v in enumerate(self.vars) if any(e[k] for e in self.terms)]
        return MultiPoly([self.vars[k] for k in keep],
                         {tuple(e[k] for k in keep): c for e, c in self.terms.items()})

    # -- arithmetic
    @staticmethod
    def _coerce(other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            return other
        if isinstance(other, int):
            return MultiPoly.const(other)
        return NotImplemented

    def __add__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        vs = self._union(self, other)
        out = self._embed(vs)
        for e, c in other._embed(vs).items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(vs, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "MultiPoly":
        return (-self) + other

    def __mul__(self, other) -> "MultiPoly":
        if isinstance(other, int):
            return MultiPoly(self.vars, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        vs = self._union(self, other)
        return MultiPoly(vs, _mul_terms(self._embed(vs), other._embed(vs)))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "MultiPoly":
        if k < 0:
            raise ValueError("negative power")
        out = MultiPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        vs = self._union(self, other)
        return self._embed(vs) == other._embed(vs)

    def __hash__(self):
        t = self.trimmed()
        return hash((t.vars, frozenset(t.terms.items())))

    # -- queries
    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self, degree: int | None = None) -> bool:
        degs = {sum(e) for e in self.terms}
        if degree is not None:
            return degs <= {degree}
        return len(degs) <= 1

    def __len__(self) -> int:
        return len(self.terms)

    def evaluate(self, point: Mapping[str, int]) -> int:
        missing = [v for v in self.used_vars() if v not in point]
        if missing:
            raise ValueError(f"no value given for {missing}")
        vals = [point.get(v, 0) for v in self.vars]
        total = 0
        for e, c in self.terms.items():
            t = c
            for x, k in zip(vals, e):
                if k:
                    t *= x ** k
            total += t
        return total

    def sorted_terms(self) -> list[tuple[tuple[int, ...], int]]:
        """Terms in graded-lex order: higher total degree first, ties broken
        lexicographically along the registry."""
        return sorted(self.terms.items(), key=lambda ec: (-sum(ec[0]), tuple(-x for x in ec[0])))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for e, c in self.sorted_terms():
            mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k)
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if not out:
                out.append(body if c > 0 else "-" + body)
            else:
                out.append(("+ " if c > 0 else "- ") + body)
        return " ".join(out)

    def __repr__(self) -> str:
        return f"MultiPoly({self})"


# -- matrices of polynomials

def entry_polys(spec: PolyMatrixSpec) -> list[list[MultiPoly]]:
    """The grid ``f_ij(X_ij)`` as multivariate polynomials."""
    return [[MultiPoly.univariate(entry_var(i, j), spec[i, j]) for j in range(spec.n)]
            for i in range(spec.m)]


def _perm_sign(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _mul_terms(a: dict, b: dict) -> dict:
    out: dict[tuple[int, ...], int] = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return out


def leibniz_det(grid: Sequence[Sequence[MultiPoly | int]]) -> MultiPoly:
    """Determinant of a square grid by the full permutation expansion."""
    n = len(grid)
    if any(len(row) != n for row in grid):
        raise ValueError("leibniz_det needs a square grid")
    if n > MAX_DET_N:
        raise ValueError(f"symbolic determinants are capped at n <= {MAX_DET_N}")
    cells = [[MultiPoly.const(e) if isinstance(e, int) else e for e in row] for row in grid]
    vs = tuple(sorted({v for row in cells for e in row for v in e.vars}, key=_var_key))
    aligned = [[e._embed(vs) for e in row] for row in cells]
    one = {(0,) * len(vs): 1}
    total: dict[tuple[int, ...], int] = {}
    for perm in itertools.permutations(range(n)):
        term = one
        for i, j in enumerate(perm):
            if not aligned[i][j]:
                break
            term = _mul_terms(term, aligned[i][j])
        else:
            sign = _perm_sign(perm)
            for e, c in term.items():
                total[e] = total.get(e, 0) + sign * c
    return MultiPoly(vs, total)


def symbolic_determinant(spec: PolyMatrixSpec) -> MultiPoly:
    """``det(f_ij(X_ij))`` expanded exactly, for square specs with n <= 5."""
    if not spec.is_square:
        raise ValueError("symbolic determinant needs a square spec")
    if spec.n > MAX_DET_N:
        raise ValueError(f"symbolic determinants are capped at n <= {MAX_DET_N} (n! term blowup)")
    return leibniz_det(entry_polys(spec))


def lower_block_pattern(n: int) -> list[list[int]]:
    """The ``(n-1) x n`` block ``[1 | I_(n-1)]``."""
    return [[1] + [1 if c == r else 0 for c in range(n - 1)] for r in range(n - 1)]


def specialize_block(spec: PolyMatrixSpec) -> MultiPoly:
    """Determinant with rows ``2..n`` replaced by ``[1 | I_(n-1)]``.

    Expanded along the first row with exact integer cofactors of the
    constant block, so the result is ``sum_j (-1)^j c_j f_1j(X_1j)``.  For the
    block above every cofactor is ``+-1`` and the result collapses to
    ``f_11 - f_12 - ... - f_1n``.
    """
    if not spec.is_square:
        raise ValueError("specialize_block needs a square spec")
    n = spec.n
    if not 3 <= n <= MAX_DET_N:
        raise ValueError(f"specialize_block needs 3 <= n <= {MAX_DET_N}, got n={n}")
    block = lower_block_pattern(n)
    total = MultiPoly.const(0)
    for j in range(n):
        minor = IntMatrix.from_rows([[row[c] for c in range(n) if c != j] for row in block])
        cof = (-1) ** j * det(minor)
        if cof:
            total = total + MultiPoly.univariate(entry_var(0, j), spec[0, j]) * cof
    return total


def specialize_block_leibniz(spec: PolyMatrixSpec) -> MultiPoly:
    """Independent route to ``specialize_block``: full expansion of the
    substituted matrix."""
    n = spec.n
    grid: list[list[MultiPoly | int]] = [entry_polys(spec)[0]]
    grid += [list(row) for row in lower_block_pattern(n)]
    return leibniz_det(grid)


def first_row_difference(spec: PolyMatrixSpec) -> MultiPoly:
    """``f_11(X_11) - sum_{j >= 2} f_1j(X_1j)``."""
    out = MultiPoly.univariate(entry_var(0, 0), spec[0, 0])
    for j in range(1, spec.n):
        out = out - MultiPoly.univariate(entry_var(0, j), spec[0, j])
    return out


def minor_index(n: int, r: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Enumeration order of the r x r minors: row subsets in lexicographic
    order, and for each row subset the column subsets in lexicographic order."""
    subsets = list(itertools.combinations(range(n), r))
    return [(rows, cols) for rows in subsets for cols in subsets]


def minor_combination(spec: PolyMatrixSpec, r: int, coeffs: Sequence[int]) -> MultiPoly:
    """``sum_h c_h D_h`` over all r x r minors ``D_h`` in ``minor_index`` order."""
    if not spec.is_square:
        raise ValueError("minor_combination needs a square spec")
    n = spec.n
    if not 3 <= r <= n <= MAX_MINOR_N:
        raise ValueError(f"minor_combination needs 3 <= r <= n <= {MAX_MINOR_N}, got r={r}, n={n}")
    index = minor_index(n, r)
    if len(coeffs) != len(index):
        raise ValueError(f"expected {len(index)} = binom({n},{r})^2 coefficients, got {len(coeffs)}")
    if not any(coeffs):
        raise ValueError("coefficients must not all be zero")
    grid = entry_polys(spec)
    total = MultiPoly.const(0)
    for c, (rows, cols) in zip(coeffs, index):
        if c:
            total = total + leibniz_det([[grid[i][j] for j in cols] for i in rows]) * int(c)
    return total


def homogenize(R: MultiPoly, target_degree: int) -> MultiPoly:
    """Multiply each term by ``Z^(target_degree - its degree)``."""
    deg = R.total_degree()
    if target_degree < deg:
        raise ValueError(f"target degree {target_degree} is below the degree {deg} of the input")
    if HOMOGENIZER in R.vars and any(e[R.vars.index(HOMOGENIZER)] for e in R.terms):
        raise ValueError(f"input already uses the variable {HOMOGENIZER}")
    base = [v for v in R.vars if v != HOMOGENIZER]
    pos = [R.vars.index(v) for v in base]
    terms = {}
    for e, c in R.terms.items():
        sub = tuple(e[k] for k in pos)
        terms[sub + (target_degree - sum(sub),)] = c
    return MultiPoly(base + [HOMOGENIZER], terms)


def square_monomial_factorization() -> tuple[MultiPoly, MultiPoly]:
    """``det`` of the 2 x 2 spec with entries ``X^2``, and the product
    ``(X11 X22 - X12 X21)(X11 X22 + X12 X21)``."""
    D = symbolic_determinant(PolyMatrixSpec.monomial(2, 2, 2))
    x = {(i, j): MultiPoly.var(entry_var(i, j)) for i in range(2) for j in range(2)}
    a = x[0, 0] * x[1, 1]
    b = x[0, 1] * x[1, 0]
    return D, (a - b) * (a + b)


def evaluate_spec_matrix(spec: PolyMatrixSpec, point: Mapping[str, int]) -> IntMatrix:
    """The integer matrix ``(f_ij(x_ij))`` at a point keyed by variable name."""
    return IntMatrix.from_rows([[spec[i, j](point[entry_var(i, j)]) for j in range(spec.n)]
                                for i in range(spec.m)])


def term_count_estimate(spec: PolyMatrixSpec) -> int:
    """Upper bound on the number of terms of the symbolic determinant."""
    n = spec.n
    best = 0
    for perm in itertools.permutations(range(n)):
        best += math.prod(sum(1 for c in spec[i, j].coeffs if c) for i, j in enumerate(perm))
    return best
