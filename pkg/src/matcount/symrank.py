"""Exact rank and determinant of integer matrices, over Q and over F_p.

Scalar routines work on ``IntMatrix`` with Python ints throughout.  The
``batch_*`` kernels take a stack of matrices as a numpy array of shape
``(B, r, c)`` and run the same eliminations across the whole stack at once;
they are what the counting engines call in their inner loop.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    data: tuple[int, ...]

    def __post_init__(self):
        if len(self.data) != self.rows * self.cols:
            raise ValueError(f"data has {len(self.data)} entries, expected {self.rows * self.cols}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "IntMatrix":
        rows = [list(r) for r in rows]
        c = len(rows[0]) if rows else 0
        if any(len(r) != c for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), c, tuple(int(v) for r in rows for v in r))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.data[i * self.cols + j]

    def to_rows(self) -> list[list[int]]:
        return [list(self.data[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols


def _check_modulus(p: int) -> None:
    if p < 2:
        raise ValueError(f"modulus must be >= 2, got {p}")


def _bareiss(rows: list[list[int]]) -> tuple[int, int, int]:
    """Fraction-free echelon reduction in place.

    Returns ``(rank, last_pivot, swaps)``.  For a square full-rank input the
    last pivot is the determinant up to the sign ``(-1)**swaps``.
    """
    r = len(rows)
    c = len(rows[0]) if r else 0
    rank, prev, swaps = 0, 1, 0
    for col in range(c):
        if rank == r:
            break
        piv = next((i for i in range(rank, r) if rows[i][col] != 0), None)
        if piv is None:
            continue
        if piv != rank:
            rows[piv], rows[rank] = rows[rank], rows[piv]
            swaps += 1
        pr = rows[rank]
        a = pr[col]
        for i in range(rank + 1, r):
            row = rows[i]
            b = row[col]
            for j in range(col + 1, c):
                row[j] = (a * row[j] - b * pr[j]) // prev
            row[col] = 0
        prev = a
        rank += 1
    return rank, prev, swaps


def rank_rational(A: IntMatrix) -> int:
    if A.rows == 0 or A.cols == 0:
        return 0
    return _bareiss(A.to_rows())[0]


def _gauss_mod(rows: list[list[int]], p: int) -> tuple[int, int]:
    """Row-reduce mod p in place; returns ``(rank, product of pivots * sign)``."""
    r = len(rows)
    c = len(rows[0]) if r else 0
    rank, detacc = 0, 1
    for col in range(c):
        if rank == r:
            break
        piv = next((i for i in range(rank, r) if rows[i][col] % p), None)
        if piv is None:
            continue
        if piv != rank:
            rows[piv], rows[rank] = rows[rank], rows[piv]
            detacc = -detacc
        pr = rows[rank]
        a = pr[col] % p
        detacc = detacc * a % p
        inv = pow(a, -1, p)
        for i in range(rank + 1, r):
            row = rows[i]
            f = row[col] * inv % p
            if f:
                for j in range(col, c):
                    row[j] = (row[j] - f * pr[j]) % p
        rank += 1
    return rank, detacc % p


def rank_mod_p(A: IntMatrix, p: int) -> int:
    _check_modulus(p)
    if A.rows == 0 or A.cols == 0:
        return 0
    rows = [[v % p for v in row] for row in A.to_rows()]
    return _gauss_mod(rows, p)[0]


def det(A: IntMatrix, modulus: int | None = None) -> int:
    """Determinant by Bareiss elimination, or reduced mod ``modulus``."""
    if not A.is_square:
        raise ValueError(f"determinant needs a square matrix, got {A.rows}x{A.cols}")
    n = A.rows
    if n == 0:
        return 1 if modulus is None else 1 % modulus
    if modulus is not None:
        _check_modulus(modulus)
        rows = [[v % modulus for v in row] for row in A.to_rows()]
        rank, d = _gauss_mod(rows, modulus)
        return d if rank == n else 0
    rank, last, swaps = _bareiss(A.to_rows())
    if rank < n:
        return 0
    return -last if swaps % 2 else last


# -- batched kernels ------------------------------------------------------

# Hadamard-type cutoff: below this entry bound int64 Bareiss cannot overflow.
_INT64_SAFE = 1 << 62


def _bareiss_fits_int64(max_abs: int, r: int, c: int) -> bool:
    # Every intermediate is a k x k minor, |minor| <= k! * A^k; products of
    # two such minors (plus one more) must stay below 2^62.
    import math

    k = min(r, c)
    bound = math.factorial(k) * max_abs ** k
    return 2 * bound * bound < _INT64_SAFE


def _as_stack(M) -> np.ndarray:
    M = np.asarray(M)
    if M.ndim != 3:
        raise ValueError("expected a stack of matrices with shape (B, r, c)")
    return M


def batch_echelon(M, modulus: int | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stacked fraction-free echelon form.

    Returns ``(rank, last_pivot, swaps)`` arrays of length B.  Over Q the
    Bareiss recurrence is used (exact: int64 when provably safe, Python-int
    object arrays otherwise).  Mod p the eliminations are division-free
    (``row_i <- a*row_i - b*row_piv``), which keeps the rank but scales the
    determinant; use ``batch_det_mod`` for determinants mod p.
    """
    M = _as_stack(M)
    B, r, c = M.shape
    if modulus is not None:
        _check_modulus(modulus)
        if modulus >= 1 << 31:
            A = (M.astype(object) % modulus)
        else:
            A = (M.astype(np.int64) % modulus)
    else:
        max_abs = int(np.max(np.abs(M))) if M.size else 0
        if M.dtype != object and _bareiss_fits_int64(max_abs, r, c):
            A = M.astype(np.int64).copy()
        else:
            A = M.astype(object).copy()
    rank = np.zeros(B, dtype=np.int64)
    prev = np.ones(B, dtype=A.dtype)
    swaps = np.zeros(B, dtype=np.int64)
    rowidx = np.arange(r)
    bidx = np.arange(B)
    for col in range(c):
        active = rank < r
        if not active.any():
            break
        colv = A[:, :, col]
        mask = (colv != 0) & (rowidx[None, :] >= rank[:, None])
        has = mask.any(axis=1) & active
        if not has.any():
            continue
        piv = np.argmax(mask, axis=1)
        sel = np.nonzero(has)[0]
        rk = rank[sel]
        pv = piv[sel]
        need = pv != rk
        if need.any():
            s2, a2, b2 = sel[need], rk[need], pv[need]
            tmp = A[s2, a2, :].copy()
            A[s2, a2, :] = A[s2, b2, :]
            A[s2, b2, :] = tmp
            swaps[s2] += 1
        prow = A[sel, rk, :]                      # (S, c)
        a = prow[:, col]                          # (S,)
        sub = A[sel]                              # (S, r, c)
        below = rowidx[None, :] > rk[:, None]     # (S, r)
        bcol = sub[:, :, col]
        if modulus is not None:
            new = (a[:, None, None] * sub - bcol[:, :, None] * prow[:, None, :]) % modulus
        else:
            new = (a[:, None, None] * sub - bcol[:, :, None] * prow[:, None, :]) // prev[sel][:, None, None]
        sub = np.where(below[:, :, None], new, sub)
        A[sel] = sub
        prev[sel] = a
        rank[sel] += 1
    del bidx
    return rank, prev, swaps


def batch_rank(M, modulus: int | None = None) -> np.ndarray:
    return batch_echelon(M, modulus)[0]


def batch_det(M) -> np.ndarray:
    """Exact determinants of a square stack (object array when not int64-safe)."""
    M = _as_stack(M)
    if M.shape[1] != M.shape[2]:
        raise ValueError("determinant needs square matrices")
    n = M.shape[1]
    if n <= 3:
        return _small_det(M.astype(object) if not _bareiss_fits_int64(
            int(np.max(np.abs(M))) if M.size else 0, n, n) or M.dtype == object else M.astype(np.int64))
    rank, last, swaps = batch_echelon(M)
    out = np.where(swaps % 2 == 1, -last, last)
    return np.where(rank == n, out, 0)


def _small_det(M: np.ndarray) -> np.ndarray:
    n = M.shape[1]
    if n == 1:
        return M[:, 0, 0]
    if n == 2:
        return M[:, 0, 0] * M[:, 1, 1] - M[:, 0, 1] * M[:, 1, 0]
    a, b, c = M[:, 0, 0], M[:, 0, 1], M[:, 0, 2]
    return (a * (M[:, 1, 1] * M[:, 2, 2] - M[:, 1, 2] * M[:, 2, 1])
            - b * (M[:, 1, 0] * M[:, 2, 2] - M[:, 1, 2] * M[:, 2, 0])
            + c * (M[:, 1, 0] * M[:, 2, 1] - M[:, 1, 1] * M[:, 2, 0]))


def batch_powmod(a: np.ndarray, e: int, p: int) -> np.ndarray:
    result = np.ones_like(a)
    base = a % p
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


def batch_det_mod(M, p: int) -> np.ndarray:
    """Determinants mod p of a square stack, values in ``[0, p)``."""
    _check_modulus(p)
    M = _as_stack(M)
    n = M.shape[1]
    if M.shape[1] != M.shape[2]:
        raise ValueError("determinant needs square matrices")
    if p >= 1 << 31:
        return np.array([det(IntMatrix(n, n, tuple(int(v) for v in m.ravel())), p) for m in M], dtype=object)
    A = M.astype(np.int64) % p
    if n <= 3:
        if n == 3:
            # cofactors reduced before the final products to stay in int64
            c0 = (A[:, 1, 1] * A[:, 2, 2] - A[:, 1, 2] * A[:, 2, 1]) % p
            c1 = (A[:, 1, 0] * A[:, 2, 2] - A[:, 1, 2] * A[:, 2, 0]) % p
            c2 = (A[:, 1, 0] * A[:, 2, 1] - A[:, 1, 1] * A[:, 2, 0]) % p
            return (A[:, 0, 0] * c0 - A[:, 0, 1] * c1 + A[:, 0, 2] * c2) % p
        return _small_det(A) % p
    # Division-free elimination multiplies det by a^(rows below pivot) at
    # each step; undo it with a single modular inverse at the end.
    B = A.shape[0]
    rank = np.zeros(B, dtype=np.int64)
    sign = np.ones(B, dtype=np.int64)
    detacc = np.ones(B, dtype=np.int64)
    scale = np.ones(B, dtype=np.int64)
    rowidx = np.arange(n)
    for col in range(n):
        colv = A[:, :, col]
        mask = (colv != 0) & (rowidx[None, :] >= rank[:, None])
        has = mask.any(axis=1) & (rank == col)
        sel = np.nonzero(has)[0]
        if sel.size == 0:
            continue
        piv = np.argmax(mask, axis=1)[sel]
        need = piv != col
        if need.any():
            s2, b2 = sel[need], piv[need]
            tmp = A[s2, col, :].copy()
            A[s2, col, :] = A[s2, b2, :]
            A[s2, b2, :] = tmp
            sign[s2] = -sign[s2]
        sub = A[sel]
        prow = sub[:, col, :]
        a = prow[:, col]
        bcol = sub[:, :, col]
        new = (a[:, None, None] * sub - bcol[:, :, None] * prow[:, None, :]) % p
        below = rowidx > col
        sub = np.where(below[None, :, None], new, sub)
        A[sel] = sub
        detacc[sel] = detacc[sel] * a % p
        scale[sel] = scale[sel] * batch_powmod(a, n - 1 - col, p) % p
        rank[sel] += 1
    inv = batch_powmod(scale, p - 2, p)
    out = (sign % p) * detacc % p * inv % p
    return np.where(rank == n, out, 0)
