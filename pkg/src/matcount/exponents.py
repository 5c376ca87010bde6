"""Exact exponent calculators for the rank-counting bounds.

Every bound handled here has the shape ``H^a p^b`` (or a max/sum of such
terms).  Exponents are ``fractions.Fraction``; no floats are used except
when a caller asks for the log-scale value of a bound at concrete ``H, p``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction as Rat

# s_t for t = 3..10
S_TABLE = {
    3: Rat(2), 4: Rat(9, 4), 5: Rat(5, 2), 6: Rat(11, 4),
    7: Rat(3), 8: Rat(3), 9: Rat(3), 10: Rat(3),
}

S_MODES = ("table", "integer")


class HypothesisError(ValueError):
    """Parameters fall outside the range where a bound was stated."""


def _largest_s(t: int, d: int) -> int:
    s = 0
    while s + 1 <= d and (s + 1) * (s + 2) <= t + 1:
        s += 1
    return s


def s_param(t: int, d: int, mode: str = "table") -> Rat:
    """The saving ``s_t``.

    ``mode="table"`` uses the tabulated values for ``3 <= t <= 10`` and the
    integer rule beyond; ``mode="integer"`` applies the integer rule
    (largest ``s <= d`` with ``s(s+1) <= t+1``) for every ``t``.
    """
    if t < 3:
        raise ValueError(f"s_t is defined for t >= 3, got t={t}")
    if d < 3:
        raise ValueError(f"need d >= 3, got d={d}")
    if mode not in S_MODES:
        raise ValueError(f"mode must be one of {S_MODES}")
    if mode == "table" and t <= 10:
        return S_TABLE[t]
    return Rat(_largest_s(t, d))


def sigma_param(k: int) -> Rat:
    """``sigma_k = s_{k-1}`` for ``4 <= k <= 11`` (independent of d >= 3)."""
    if not 4 <= k <= 11:
        raise ValueError(f"sigma_k is defined for 4 <= k <= 11, got {k}")
    return s_param(k - 1, 3)


def _order(m: int, n: int, r: int, r_min: int) -> None:
    if not (n >= m >= r >= r_min):
        raise HypothesisError(f"need n >= m >= r >= {r_min}, got (m, n, r) = ({m}, {n}, {r})")


def delta_term(t: int, d: int, m: int, n: int, r: int, mode: str = "table") -> Rat:
    s = s_param(t, d, mode)
    return (t - 1) * m - n * (s - 1) - r * (t - s)


def delta_exponent(d: int, m: int, n: int, r: int, mode: str = "table") -> Rat:
    """``max(0, max_{3<=t<=r} (t-1)m - n(s_t-1) - r(t-s_t))``; 0 when r <= 2."""
    if d < 3:
        raise HypothesisError(f"need d >= 3, got {d}")
    _order(m, n, r, 1)
    best = Rat(0)
    for t in range(3, r + 1):
        best = max(best, delta_term(t, d, m, n, r, mode))
    return best


def gamma_exponent(m: int, n: int, r: int) -> Rat:
    _order(m, n, r, 3)
    return max(Rat(0), m - Rat(n + r, 2), Rat(m * (r - 1) - n - r * (r - 2)))


class Bound(str, Enum):
    KATZNELSON_12 = "katznelson_12"
    BL_14 = "bl_14"
    AHMSHP_ERR_15 = "ahmshp_err_15"
    EBLS_16 = "ebls_16"
    THM21 = "thm21"
    SIMPLE_23 = "simple_23"
    SQUARE_24 = "square_24"
    SING_25 = "sing_25"
    BLSHARP_REM22 = "blsharp_rem22"
    THM22 = "thm22"
    EQ26 = "eq26"


# parameter slots each bound reads
ARITY = {
    Bound.KATZNELSON_12: ("n", "r"),
    Bound.BL_14: ("m", "n", "r"),
    Bound.AHMSHP_ERR_15: ("m", "n", "r"),
    Bound.EBLS_16: ("m", "n", "r"),
    Bound.THM21: ("d", "m", "n", "r"),
    Bound.SIMPLE_23: ("m", "n", "r"),
    Bound.SQUARE_24: ("d", "n", "r"),
    Bound.SING_25: ("d", "n"),
    Bound.BLSHARP_REM22: ("m", "n", "r"),
    Bound.THM22: ("m", "n", "r"),
    Bound.EQ26: ("n", "r"),
}

DESCRIPTIONS = {
    Bound.KATZNELSON_12: "linear entries, rank r: H^(nr)",
    Bound.BL_14: "monomial entries: H^(mr + (n-r)(r-1))",
    Bound.AHMSHP_ERR_15: "linear entries mod p: main H^(mn) p^-((m-r)(n-r)), errors p^(r(m+n-r)/2), H^(r(m+n-r)-1) p^(1/2)",
    Bound.EBLS_16: "linear entries mod p: max(H^(mr), H^(mn) p^-((m-r)(n-r)))",
    Bound.THM21: "polynomial entries over Z: H^(m+nr-r+Delta)",
    Bound.SIMPLE_23: "crude three-term form of thm21",
    Bound.SQUARE_24: "thm21 at m = n: H^(nr + (n-r)(r-s_r+1))",
    Bound.SING_25: "singular square matrices: H^(n^2 - s_(n-1))",
    Bound.BLSHARP_REM22: "no proportional rows: H^(3m+n(r-1)-2r) + H^(mr+(n-r)(r-5/4))",
    Bound.THM22: "polynomial entries mod p, small H: H^(m+nr-r+Gamma)",
    Bound.EQ26: "thm22 at m = n: H^(nr + (n-r)(r-1))",
}


@dataclass(frozen=True)
class BoundFormula:
    kind: Bound
    d: int | None = None
    m: int | None = None
    n: int | None = None
    r: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Bound(self.kind))
        slots = ARITY[self.kind]
        for name in ("d", "m", "n", "r"):
            given = getattr(self, name) is not None
            if name in slots and not given:
                raise ValueError(f"{self.kind.value} needs parameter {name}")

    @classmethod
    def of(cls, kind, **params) -> "BoundFormula":
        """Build from a parameter pool, keeping only the slots ``kind`` uses."""
        kind = Bound(kind)
        return cls(kind, **{k: v for k, v in params.items() if k in ARITY[kind]})


@dataclass(frozen=True)
class Branch:
    label: str
    h_exp: Rat
    p_exp: Rat = Rat(0)
    role: str = "bound"   # "bound", "main" or "error"

    def log_value(self, H: float, p: float | None) -> float:
        v = float(self.h_exp) * math.log(H)
        if self.p_exp:
            if p is None:
                raise ValueError(f"branch {self.label} needs p")
            v += float(self.p_exp) * math.log(p)
        return v


@dataclass(frozen=True)
class Prediction:
    formula: BoundFormula
    branches: tuple[Branch, ...]
    selected: Branch | None = None
    log_value: float | None = None
    outside_hypotheses: bool = False
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def exponent(self) -> Rat:
        """The H exponent of the single (or dominant) branch."""
        if self.selected is not None:
            return self.selected.h_exp
        if len(self.branches) == 1:
            return self.branches[0].h_exp
        raise ValueError(f"{self.formula.kind.value} has several branches; supply H and p to select one")


def _branches(f: BoundFormula, mode: str, strict: bool = True) -> tuple[list[Branch], list[str]]:
    d, m, n, r = f.d, f.m, f.n, f.r
    K = f.kind
    violations: list[str] = []

    def need(cond: bool, msg: str) -> None:
        if not cond:
            if strict:
                raise HypothesisError(msg)
            violations.append(msg)

    def order(m_: int, n_: int, r_: int, r_min: int) -> None:
        need(n_ >= m_ >= r_ >= r_min, f"need n >= m >= r >= {r_min}, got (m, n, r) = ({m_}, {n_}, {r_})")

    def s_of(t: int) -> Rat:
        # outside the hypotheses, clamp into the domain of s_t
        return s_param(max(t, 3), max(d, 3), mode)

    if K in (Bound.THM21, Bound.SQUARE_24, Bound.SING_25):
        need(d >= 3, f"need d >= 3, got {d}")

    if K is Bound.KATZNELSON_12:
        need(n >= r > 0, f"need n >= r > 0, got n={n}, r={r}")
        out = [Branch("H^(nr)", Rat(n * r))]
    elif K is Bound.BL_14:
        order(m, n, r, 1)
        out = [Branch("H^(mr+(n-r)(r-1))", Rat(m * r + (n - r) * (r - 1)))]
    elif K is Bound.AHMSHP_ERR_15:
        need(0 < r <= min(m, n), f"need 0 < r <= min(m, n), got (m, n, r) = ({m}, {n}, {r})")
        k = r * (m + n - r)
        out = [
            Branch("H^(mn) p^-((m-r)(n-r))", Rat(m * n), Rat(-(m - r) * (n - r)), "main"),
            Branch("p^(r(m+n-r)/2)", Rat(0), Rat(k, 2), "error"),
            Branch("H^(r(m+n-r)-1) p^(1/2)", Rat(k - 1), Rat(1, 2), "error"),
        ]
    elif K is Bound.EBLS_16:
        order(m, n, r, 1)
        out = [
            Branch("H^(mr)", Rat(m * r)),
            Branch("H^(mn) p^-((m-r)(n-r))", Rat(m * n), Rat(-(m - r) * (n - r))),
        ]
    elif K is Bound.THM21:
        order(m, n, r, 4)
        delta = max([Rat(0)] + [(t - 1) * m - n * (s_of(t) - 1) - r * (t - s_of(t)) for t in range(3, r + 1)])
        out = [Branch("H^(m+nr-r+Delta)", m + n * r - r + delta)]
    elif K is Bound.SIMPLE_23:
        order(m, n, r, 4)
        out = [
            Branch("H^(m+nr-r)", Rat(m + n * r - r)),
            Branch("H^(3m+n(r-1)-2r)", Rat(3 * m + n * (r - 1) - 2 * r)),
            Branch("H^(mr+(n-r)(r-5/4))", m * r + (n - r) * (r - Rat(5, 4))),
        ]
    elif K is Bound.SQUARE_24:
        order(n, n, r, 4)
        out = [Branch("H^(nr+(n-r)(r-s_r+1))", n * r + (n - r) * (r - s_of(r) + 1))]
    elif K is Bound.SING_25:
        need(n >= 4, f"need n >= 4, got {n}")
        out = [Branch("H^(n^2-s_(n-1))", n * n - s_of(n - 1))]
    elif K is Bound.BLSHARP_REM22:
        order(m, n, r, 4)
        out = [
            Branch("H^(3m+n(r-1)-2r)", Rat(3 * m + n * (r - 1) - 2 * r)),
            Branch("H^(mr+(n-r)(r-5/4))", m * r + (n - r) * (r - Rat(5, 4))),
        ]
    elif K is Bound.THM22:
        order(m, n, r, 3)
        gamma = max(Rat(0), m - Rat(n + r, 2), Rat(m * (r - 1) - n - r * (r - 2)))
        out = [Branch("H^(m+nr-r+Gamma)", m + n * r - r + gamma)]
    elif K is Bound.EQ26:
        order(n, n, r, 3)
        out = [Branch("H^(nr+(n-r)(r-1))", Rat(n * r + (n - r) * (r - 1)))]
    else:
        raise ValueError(K)
    return out, violations


def predicted_exponent(formula: BoundFormula, H: float | None = None, p: float | None = None,
                       *, force: bool = False, mode: str = "table") -> Prediction:
    """Exponents of a named bound.

    Pure powers of ``H`` are compared exactly, so multi-branch bounds without
    ``p`` always report their dominant branch.  Bounds involving ``p`` pick
    the largest branch on the log scale once ``H`` and ``p`` are supplied
    (for ``ahmshp_err_15`` the comparison runs over the error terms only).
    With ``force=True`` the hypotheses of the statement are not enforced and
    the result is flagged ``outside_hypotheses``.
    """
    branches, notes = _branches(formula, mode, strict=not force)
    candidates = [b for b in branches if b.role != "main"]
    selected = None
    log_value = None
    if all(b.p_exp == 0 for b in candidates):
        selected = max(candidates, key=lambda b: b.h_exp)
    if H is not None:
        if any(b.p_exp for b in candidates) and p is None:
            raise ValueError(f"{formula.kind.value} needs p to select a branch")
        selected = max(candidates, key=lambda b: b.log_value(H, p))
        log_value = selected.log_value(H, p)
    return Prediction(formula, tuple(branches), selected, log_value, bool(notes), tuple(notes))


# -- cross-identity checks ----------------------------------------------------

def square_reduction_holds(n: int, r: int, d: int, mode: str = "table") -> bool:
    """thm21 at m = n equals nr + (n-r)(r - s_r + 1)."""
    lhs = predicted_exponent(BoundFormula(Bound.THM21, d, n, n, r), mode=mode).exponent
    rhs = predicted_exponent(BoundFormula(Bound.SQUARE_24, d, None, n, r), mode=mode).exponent
    return lhs == rhs


def thm22_square_reduction_holds(n: int, r: int) -> bool:
    lhs = predicted_exponent(BoundFormula(Bound.THM22, None, n, n, r)).exponent
    rhs = predicted_exponent(BoundFormula(Bound.EQ26, None, None, n, r)).exponent
    return lhs == rhs


def t_minus_s_nondecreasing(t_max: int, d: int, mode: str = "table") -> bool:
    vals = [t - s_param(t, d, mode) for t in range(3, t_max + 1)]
    return all(a <= b for a, b in zip(vals, vals[1:]))


def exponent_table(d: int, m: int, n: int, r: int, H: float | None = None, p: float | None = None,
                   force: bool = False, mode: str = "table") -> list[tuple[str, Prediction | None, str]]:
    """Every named bound evaluated at ``(d, m, n, r)`` where its slots allow.

    Returns ``(name, prediction or None, note)`` rows; inapplicable bounds
    carry the reason in ``note``.
    """
    rows = []
    pool = {"d": d, "m": m, "n": n, "r": r}
    for kind in Bound:
        if kind in (Bound.SQUARE_24, Bound.EQ26) and m != n:
            rows.append((kind.value, None, "square case only (m = n)"))
            continue
        f = BoundFormula.of(kind, **pool)
        if kind is Bound.SING_25:
            f = BoundFormula(kind, d=d, n=n)
        try:
            rows.append((kind.value, predicted_exponent(f, H, p, force=force, mode=mode), ""))
        except (HypothesisError, ValueError) as exc:
            rows.append((kind.value, None, str(exc)))
    return rows
