"""Exhaustive counting over boxes of polynomial matrices.

Every count here is exact: the box ``[-H, H]^(m n)`` (or a per-entry
interval override) is enumerated in full.  Enumeration runs as a mixed-radix
odometer over the entries in row-major order with the last entries varying
fastest.  The trailing entries form an *inner block* whose value columns are
built once; each outer index tuple broadcasts its constants into that block
and the predicate is evaluated on the whole stack with the batched kernels of
``symrank``.

Sharding splits the range of the first (outermost) variable into contiguous
pieces; each shard is an independent pure job and the per-shard counts are
summed, so the total never depends on the shard count.
"""
from __future__ import annotations

import itertools
import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .polycore import IntPoly, PolyMatrixSpec, eval_int
from .symgroup import Partition, class_function
from .symrank import (
    IntMatrix,
    batch_det,
    batch_det_mod,
    batch_rank,
    rank_rational,
)

DEFAULT_BUDGET = 10**9
INNER_BLOCK = 1 << 18

KINDS = ("rank_eq_Q", "rank_eq_modp", "det_eq_value", "imm_zero_modp", "full_residue_det_zero")
_NEEDS_P = {"rank_eq_modp", "imm_zero_modp", "full_residue_det_zero"}
_SQUARE = {"det_eq_value", "imm_zero_modp", "full_residue_det_zero"}


class BudgetExceeded(ValueError):
    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(f"query needs {required} predicate evaluations, budget is {budget}")


@dataclass(frozen=True)
class CountQuery:
    """One counting problem.

    ``intervals`` overrides the symmetric box: either one ``(lo, hi)`` pair
    applied to every variable, or ``m*n`` pairs in row-major entry order.
    ``H`` is still recorded for provenance.
    """

    spec: PolyMatrixSpec
    H: int
    kind: str
    r: int | None = None
    a: int | None = None
    lam: Partition | None = None
    p: int | None = None
    budget: int = DEFAULT_BUDGET
    intervals: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown query kind {self.kind!r}")
        if self.H < 0:
            raise ValueError("H must be >= 0")
        if self.kind in _NEEDS_P and self.p is None:
            raise ValueError(f"{self.kind} needs a prime p")
        if self.p is not None and self.p < 2:
            raise ValueError("p must be >= 2")
        if self.kind in _SQUARE and not self.spec.is_square:
            raise ValueError(f"{self.kind} needs a square spec")
        if self.kind in ("rank_eq_Q", "rank_eq_modp"):
            if self.r is None or not 0 <= self.r <= min(self.spec.m, self.spec.n):
                raise ValueError(f"target rank must lie in [0, {min(self.spec.m, self.spec.n)}], got {self.r}")
        if self.kind == "det_eq_value" and self.a is None:
            raise ValueError("det_eq_value needs a target value a")
        if self.kind == "imm_zero_modp":
            if self.lam is None:
                raise ValueError("imm_zero_modp needs a partition lam")
            if self.lam.n != self.spec.n:
                raise ValueError("partition size must equal the matrix size")
            self.spec.require_nonconstant()
        if self.intervals is not None:
            iv = tuple((int(lo), int(hi)) for lo, hi in self.intervals)
            if len(iv) == 1:
                iv = iv * (self.spec.m * self.spec.n)
            if len(iv) != self.spec.m * self.spec.n:
                raise ValueError("intervals must hold 1 or m*n (lo, hi) pairs")
            if any(lo > hi for lo, hi in iv):
                raise ValueError("empty interval")
            object.__setattr__(self, "intervals", iv)

    def ranges(self) -> list[range]:
        if self.intervals is not None:
            return [range(lo, hi + 1) for lo, hi in self.intervals]
        return [range(-self.H, self.H + 1)] * (self.spec.m * self.spec.n)

    def box_size(self) -> int:
        return math.prod(len(r) for r in self.ranges())

    def check_budget(self) -> None:
        need = self.box_size()
        if need > self.budget:
            raise BudgetExceeded(need, self.budget)

    def echo(self) -> dict:
        return {
            "kind": self.kind,
            "m": self.spec.m,
            "n": self.spec.n,
            "H": self.H,
            "r": self.r,
            "a": self.a,
            "lambda": str(self.lam) if self.lam is not None else None,
            "p": self.p,
            "intervals": self.intervals,
        }


@dataclass
class CountRecord:
    query: CountQuery
    count: int
    evaluations: int
    elapsed: float
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        assert 0 <= self.count <= self.evaluations


# -- value tables and the enumeration core --------------------------------

def _value_table(f: IntPoly, rng: range, p: int | None) -> np.ndarray:
    vals = [eval_int(f, x) for x in rng]
    if p is not None:
        vals = [v % p for v in vals]
    if all(-(1 << 62) < v < (1 << 62) for v in vals):
        return np.array(vals, dtype=np.int64)
    return np.array(vals, dtype=object)


def _split_inner(sizes: Sequence[int], target: int) -> int:
    """Index of the first inner entry: trailing entries whose product <= target."""
    k = len(sizes)
    prod = 1
    while k > 0 and prod * sizes[k - 1] <= target:
        prod *= sizes[k - 1]
        k -= 1
    return k


def _predicate(kind: str, M: np.ndarray, params: dict) -> np.ndarray:
    """Boolean mask over a stack ``M`` of shape ``(B, m, n)``."""
    p = params.get("p")
    if kind == "rank_eq_Q":
        return batch_rank(M) == params["r"]
    if kind == "rank_eq_modp":
        return batch_rank(M, p) == params["r"]
    if kind == "det_eq_value":
        if p is None:
            return batch_det(M) == params["a"]
        return batch_det_mod(M, p) == params["a"] % p
    if kind == "imm_zero_modp":
        return batch_immanant_mod(M, params["weights"], p) == 0
    if kind == "full_residue_det_zero":
        return batch_det_mod(M, p) == 0
    raise ValueError(kind)


def batch_immanant_mod(M: np.ndarray, weights: Sequence[tuple[tuple[int, ...], int]], p: int) -> np.ndarray:
    """Immanants mod p of a square stack from (permutation, chi) weights."""
    A = M.astype(np.int64) % p if p < 1 << 31 else M.astype(object) % p
    n = A.shape[1]
    total = np.zeros(A.shape[0], dtype=A.dtype)
    for sigma, w in weights:
        prod = A[:, 0, sigma[0]]
        for i in range(1, n):
            prod = prod * A[:, i, sigma[i]] % p
        total = (total + (w % p) * prod) % p
    return total


def permutation_weights(lam: Partition) -> list[tuple[tuple[int, ...], int]]:
    """Every permutation of S_n with its character value, zeros dropped."""
    n = lam.n
    chi = class_function(lam, n)
    out = []
    for sigma in itertools.permutations(range(n)):
        seen = [False] * n
        lengths = []
        for s in range(n):
            if not seen[s]:
                L, x = 0, s
                while not seen[x]:
                    seen[x] = True
                    x = sigma[x]
                    L += 1
                lengths.append(L)
        w = chi[tuple(sorted(lengths, reverse=True))]
        if w:
            out.append((sigma, w))
    return out


def _count_box(spec: PolyMatrixSpec, ranges: Sequence[range], kind: str, params: dict,
               inner_target: int = INNER_BLOCK) -> int:
    m, n = spec.m, spec.n
    p = None if kind == "rank_eq_Q" else params.get("p")
    tables = [_value_table(f, rg, p) for f, rg in zip(spec.flat(), ranges)]
    if any(len(t) == 0 for t in tables):
        return 0
    dtype = object if any(t.dtype == object for t in tables) else np.int64
    sizes = [len(t) for t in tables]
    split = _split_inner(sizes, inner_target)
    inner_sizes = sizes[split:]
    S = math.prod(inner_sizes)
    block = np.empty((S, m * n), dtype=dtype)
    if inner_sizes:
        grids = np.indices(inner_sizes).reshape(len(inner_sizes), -1)
        for k, e in enumerate(range(split, m * n)):
            block[:, e] = tables[e][grids[k]]
    count = 0
    for outer in itertools.product(*(range(s) for s in sizes[:split])):
        for e, idx in enumerate(outer):
            block[:, e] = tables[e][idx]
        mask = _predicate(kind, block.reshape(S, m, n), params)
        count += int(np.count_nonzero(mask))
    return count


def _shard_job(args) -> int:
    spec_obj, ranges, kind, params = args
    spec = PolyMatrixSpec.from_json_obj(spec_obj)
    return _count_box(spec, [range(a, b) for a, b in ranges], kind, params)


def _shard_ranges(ranges: Sequence[range], shards: int) -> list[list[range]]:
    first = ranges[0]
    k = max(1, min(shards, len(first)))
    cuts = [first.start + (len(first) * i) // k for i in range(k + 1)]
    return [[range(cuts[i], cuts[i + 1])] + list(ranges[1:]) for i in range(k)]


def run_count(query: CountQuery, shards: int = 1, workers: int | None = None) -> CountRecord:
    """Evaluate any ``CountQuery``; the per-kind helpers below wrap this."""
    query.check_budget()
    t0 = time.perf_counter()
    params: dict = {"p": query.p, "r": query.r, "a": query.a}
    if query.kind == "imm_zero_modp":
        params["weights"] = permutation_weights(query.lam)
    ranges = query.ranges()
    pieces = _shard_ranges(ranges, shards)
    if len(pieces) == 1:
        count = _count_box(query.spec, ranges, query.kind, params)
    else:
        jobs = [(query.spec.to_json_obj(), [(r.start, r.stop) for r in rs], query.kind, params)
                for rs in pieces]
        if workers == 0:
            counts = [_shard_job(j) for j in jobs]
        else:
            with ProcessPoolExecutor(max_workers=workers or min(len(jobs), 8)) as pool:
                counts = list(pool.map(_shard_job, jobs))
        count = sum(counts)
    elapsed = time.perf_counter() - t0
    return CountRecord(query, count, query.box_size(), elapsed,
                       {"shards": len(pieces), "budget": query.budget})


def count_rank(spec: PolyMatrixSpec, H: int, r: int, p: int | None = None, *,
               budget: int = DEFAULT_BUDGET, intervals=None, shards: int = 1) -> CountRecord:
    """``#{x in box : rank f(x) = r}`` over Q, or over F_p when ``p`` is given."""
    kind = "rank_eq_Q" if p is None else "rank_eq_modp"
    q = CountQuery(spec, H, kind, r=r, p=p, budget=budget, intervals=intervals)
    return run_count(q, shards)


def count_det_value(spec: PolyMatrixSpec, H: int, a: int, p: int | None = None, *,
                    budget: int = DEFAULT_BUDGET, intervals=None, shards: int = 1) -> CountRecord:
    q = CountQuery(spec, H, "det_eq_value", a=a, p=p, budget=budget, intervals=intervals)
    return run_count(q, shards)


def count_imm_zero_mod_p(spec: PolyMatrixSpec, H: int, lam: Partition, p: int, *,
                         budget: int = DEFAULT_BUDGET, intervals=None, shards: int = 1) -> CountRecord:
    q = CountQuery(spec, H, "imm_zero_modp", lam=lam, p=p, budget=budget, intervals=intervals)
    return run_count(q, shards)


def count_full_residue_zero(spec: PolyMatrixSpec, p: int, *, budget: int = DEFAULT_BUDGET,
                            shards: int = 1) -> CountRecord:
    """Zeros of ``det f(x)`` mod p with every variable running over ``0..p-1``."""
    q = CountQuery(spec, (p - 1) // 2, "full_residue_det_zero", p=p, budget=budget,
                   intervals=((0, p - 1),))
    return run_count(q, shards)


def full_residue_intervals(p: int) -> tuple[tuple[int, int]]:
    """A complete residue system as an interval: ``[-(p-1)/2, (p-1)/2]``, or
    ``[0, 1]`` for p = 2 where the symmetric box collapses to ``{0}``."""
    if p == 2:
        return ((0, 1),)
    h = (p - 1) // 2
    return ((-h, h),)


# -- oracles ----------------------------------------------------------------

def rank_count_formula(m: int, n: int, r: int, q: int) -> int:
    """Number of m x n matrices of rank r over F_q."""
    num, den = 1, 1
    for i in range(r):
        num *= (q**m - q**i) * (q**n - q**i)
        den *= q**r - q**i
    return num // den


def invertible_count(n: int, q: int) -> int:
    return math.prod(q**n - q**i for i in range(n))


# -- low-rank construction ---------------------------------------------------

@dataclass
class LowRankSummary:
    requested: int
    accepted: int
    attempts: int

    @property
    def acceptance_ratio(self) -> float:
        return self.accepted / self.attempts if self.attempts else 0.0


def iter_low_rank(spec: PolyMatrixSpec, H: int, r: int, sample_count: int, seed: int,
                  summary: LowRankSummary | None = None,
                  max_attempts: int | None = None) -> Iterator[IntMatrix]:
    """Yield matrices of rank <= r built by repeating the first row's arguments.

    Arguments of the top ``r`` rows are drawn uniformly from ``[-H, H]``;
    draws whose top-left ``r x r`` value block is singular are rejected.
    Rows ``r+1..m`` reuse the arguments of row 1, which needs
    ``f[h][j] == f[0][j]`` for those rows.
    """
    m, n = spec.m, spec.n
    if not 1 <= r <= min(m, n):
        raise ValueError(f"r must lie in [1, {min(m, n)}], got {r}")
    for h in range(r, m):
        for j in range(n):
            if spec[h, j] != spec[0, j]:
                raise ValueError(f"entry ({h},{j}) must equal entry (0,{j}) for the row-copy construction")
    rng = random.Random(seed)
    if summary is None:
        summary = LowRankSummary(sample_count, 0, 0)
    limit = max_attempts if max_attempts is not None else 1000 * max(sample_count, 1)
    while summary.accepted < sample_count:
        if summary.attempts >= limit:
            raise RuntimeError(f"only {summary.accepted} of {sample_count} samples after {limit} attempts")
        summary.attempts += 1
        args = [[rng.randint(-H, H) for _ in range(n)] for _ in range(r)]
        vals = [[eval_int(spec[i, j], args[i][j]) for j in range(n)] for i in range(r)]
        top = IntMatrix.from_rows([row[:r] for row in vals])
        if rank_rational(top) < r:
            continue
        for h in range(r, m):
            vals.append([eval_int(spec[h, j], args[0][j]) for j in range(n)])
        summary.accepted += 1
        yield IntMatrix.from_rows(vals)


def generate_low_rank(spec: PolyMatrixSpec, H: int, r: int, sample_count: int,
                      seed: int) -> tuple[list[IntMatrix], LowRankSummary]:
    summary = LowRankSummary(sample_count, 0, 0)
    mats = list(iter_low_rank(spec, H, r, sample_count, seed, summary))
    return mats, summary
