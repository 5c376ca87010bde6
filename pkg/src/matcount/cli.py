"""Command line entry point: ``python -m matcount <command> ...``.

Global flags may be given before or after the subcommand.  Exit codes:
0 when every judged case passes, 1 when any fails, 2 on configuration or
input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import countlab, harness
from .exponents import DESCRIPTIONS, S_MODES, Bound, exponent_table
from .harness import ConfigError, ExperimentConfig, Row, VerifyReport, require_prime
from .momentlab import even_moment_I, moment_J, slope_estimate
from .polycore import IntPoly, PolyMatrixSpec, random_matrix_spec
from .symbolic import (
    first_row_difference,
    specialize_block,
    square_monomial_factorization,
    symbolic_determinant,
)
from .symgroup import CharacterTable, Partition, immanant, permanent_ryser
from .symrank import IntMatrix

GLOBAL_DEFAULTS = {"config": None, "shards": 1, "budget": countlab.DEFAULT_BUDGET, "seed": None, "out": None}


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # suppressed defaults let the flags appear on either side of the subcommand
    kw = {"default": argparse.SUPPRESS} if suppress else {}
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="experiment config (JSON)", **kw)
    p.add_argument("--shards", type=int, help="split each count into this many jobs", **kw)
    p.add_argument("--budget", type=int, help="maximum number of box points per count", **kw)
    p.add_argument("--seed", type=int, help="seed for random instances", **kw)
    p.add_argument("--out", help="CSV output path", **kw)
    return p


def _add_instance_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("instance")
    g.add_argument("--spec", help="PolyMatrixSpec JSON file")
    g.add_argument("--preset", choices=("linear", "monomial", "random"), default="linear")
    g.add_argument("-m", type=int, default=2)
    g.add_argument("-n", type=int)
    g.add_argument("-d", "--degree", type=int, default=1, help="degree for monomial or random presets")
    g.add_argument("--coeff-bound", type=int, default=5)


def _instance(args) -> tuple[PolyMatrixSpec, int | None]:
    if args.spec:
        if not Path(args.spec).is_file():
            raise ConfigError(f"spec file not found: {args.spec}")
        return PolyMatrixSpec.load(args.spec), None
    n = args.n if args.n is not None else args.m
    if args.preset == "linear":
        return PolyMatrixSpec.linear(args.m, n), None
    if args.preset == "monomial":
        return PolyMatrixSpec.monomial(args.m, n, args.degree), None
    if args.seed is None:
        raise ConfigError("--seed is required with --preset random")
    return random_matrix_spec(args.seed, args.m, n, args.degree, args.coeff_bound), args.seed


def _poly(text: str | None, degree: int) -> IntPoly:
    """``--f "0,0,1"`` (ascending coefficients) or the monomial ``X^degree``."""
    if text:
        return IntPoly(int(c) for c in text.split(","))
    return IntPoly.monomial(degree)


def _emit(report: VerifyReport, args, cfg: ExperimentConfig | None = None) -> int:
    text = harness.render_csv(report, cfg)
    if args.out:
        harness.write_csv(report, args.out, cfg)
        print(report.summary())
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(harness.csv_body(text))
        print(report.summary(), file=sys.stderr)
    return report.exit_code


def cmd_count(args) -> int:
    spec, seed = _instance(args)
    if args.p is not None:
        require_prime(args.p)
    row = Row("count", args.kind, m=spec.m, n=spec.n, d=spec.max_degree(), H=args.H, p=args.p, seed=seed)
    intervals = countlab.full_residue_intervals(args.p) if args.full_residue and args.p else None
    try:
        if args.kind == "rank":
            if args.r is None:
                raise ConfigError("--r is required for rank counts")
            rec = countlab.count_rank(spec, args.H, args.r, args.p, budget=args.budget,
                                      intervals=intervals, shards=args.shards)
            row.r = args.r
        elif args.kind == "det":
            rec = countlab.count_det_value(spec, args.H, args.a, args.p, budget=args.budget,
                                           intervals=intervals, shards=args.shards)
            row.a = args.a
        elif args.kind == "imm":
            if args.p is None or args.lam is None:
                raise ConfigError("--p and --lambda are required for immanant counts")
            lam = Partition.parse(args.lam)
            rec = countlab.count_imm_zero_mod_p(spec, args.H, lam, args.p, budget=args.budget,
                                                intervals=intervals, shards=args.shards)
            row.lam = str(lam)
        else:
            if args.p is None:
                raise ConfigError("--p is required for full-residue counts")
            rec = countlab.count_full_residue_zero(spec, args.p, budget=args.budget, shards=args.shards)
            row.H = rec.query.H
    except harness.BUDGET_ERRORS as exc:
        row.status, row.note = harness.SKIPPED, f"budget refusal: {exc}"
        return _emit(VerifyReport("count", [row]), args)
    row.value, row.elapsed_s = rec.count, rec.elapsed
    return _emit(VerifyReport("count", [row]), args)


def cmd_moments(args) -> int:
    f = _poly(args.f, args.degree)
    if args.p is not None:
        require_prime(args.p)
        res = moment_J(f, args.H, args.p, args.k, budget=args.budget)
    else:
        res = even_moment_I(f, args.H, args.k)
    print(f"f = {f}")
    print(f"{res.quantity}_{res.k}(H={res.H}{'' if res.p is None else f', p={res.p}'}) = {harness.fmt(res.value)}")
    print(f"method: {res.method}" + (f", error bound {res.error_bound:.3g}" if res.error_bound else ""))
    return 0


def cmd_immanant(args) -> int:
    if args.table:
        print(CharacterTable.build(args.table).format())
        return 0
    if not args.matrix:
        raise ConfigError("give --table N or --matrix JSON")
    A = IntMatrix.from_rows(json.loads(args.matrix))
    lam = Partition.parse(args.lam) if args.lam else Partition.sign(A.rows)
    if args.p is not None:
        require_prime(args.p)
    print(f"imm_{lam} = {immanant(A, lam, args.p)}")
    if lam == Partition.trivial(A.rows) and args.p is None:
        print(f"permanent (Ryser) = {permanent_ryser(A)}")
    return 0


def cmd_exponents(args) -> int:
    rows = exponent_table(args.d, args.m_, args.n_, args.r, args.H, args.p, force=args.force, mode=args.s_mode)
    width = max(len(name) for name, _, _ in rows)
    print(f"exponents at d={args.d}, m={args.m_}, n={args.n_}, r={args.r}"
          + (f", H={args.H}, p={args.p}" if args.H else ""))
    for name, pred, note in rows:
        if pred is None or pred.selected is None:
            print(f"  {name:<{width}}  --        ({note or 'several branches; give --H and --p'})")
            continue
        b = pred.selected
        val = harness.fmt(b.h_exp)
        extra = f" p^{harness.fmt(b.p_exp)}" if b.p_exp else ""
        flag = "  [outside hypotheses]" if pred.outside_hypotheses else ""
        print(f"  {name:<{width}}  H^{val}{extra} = H^{float(b.h_exp):.4f}{flag}")
    if args.verbose:
        for name, _, _ in rows:
            print(f"  {name}: {DESCRIPTIONS[Bound(name)]}")
    return 0


def cmd_symbolic(args) -> int:
    ok = True
    D, P = square_monomial_factorization()
    same = D == P
    ok &= same
    print(f"det of 2x2 squares: {D}")
    print(f"factored product:   {P}")
    print(f"equal: {same}")
    if args.spec or args.preset != "linear" or args.m != 2:
        spec, _ = _instance(args)
        if spec.is_square and spec.n <= 5:
            print(f"det = {symbolic_determinant(spec)}")
        if spec.is_square and 3 <= spec.n <= 5:
            S = specialize_block(spec)
            good = S == first_row_difference(spec)
            ok &= good
            print(f"specialized: {S}")
            print(f"equals f11 - sum f1j: {good}")
    return 0 if ok else 1


def cmd_verify(args) -> int:
    report = harness.verify_suite(args.suite, shards=args.shards)
    return _emit(report, args)


def cmd_run(args) -> int:
    if not args.config:
        raise ConfigError("run needs --config")
    cfg = ExperimentConfig.load(args.config)
    # explicit command line flags override the config
    for key in ("shards", "budget", "seed"):
        if getattr(args, key) != GLOBAL_DEFAULTS[key]:
            setattr(cfg, key, getattr(args, key))
    cfg.validate()
    report = harness.run_experiment(cfg, out=args.out)
    target = args.out or cfg.out
    if target:
        print(report.summary())
        print(f"wrote {target}")
    else:
        sys.stdout.write(harness.csv_body(harness.render_csv(report, cfg)))
        print(report.summary(), file=sys.stderr)
    return report.exit_code


def cmd_slope(args) -> int:
    f = _poly(args.f, args.degree)
    Hs = sorted(args.H)
    pts = [(H, int(even_moment_I(f, H, args.k).value)) for H in Hs]
    for H, v in pts:
        print(f"  H={H:<6d} I_{args.k} = {v}")
    slope = slope_estimate(pts)
    print(f"fitted slope of log I_{args.k}(f, H) against log H: {slope:.4f}")
    if args.bound is not None:
        bound = float(Fraction(args.bound))
        verdict = "PASS" if slope <= bound else "FAIL"
        print(f"slope <= {args.bound}: {verdict}")
        return 0 if slope <= bound else 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="matcount", parents=[_global_flags(False)],
                                  description="Counting matrices with polynomial entries of bounded height.")
    top.set_defaults(**GLOBAL_DEFAULTS)
    sub = top.add_subparsers(dest="command", required=True)
    flags = _global_flags(True)

    p = sub.add_parser("count", parents=[flags], help="exact box counts")
    _add_instance_args(p)
    p.add_argument("--kind", choices=("rank", "det", "imm", "full-residue"), default="rank")
    p.add_argument("--H", type=int, default=1)
    p.add_argument("--r", type=int)
    p.add_argument("--a", type=int, default=0)
    p.add_argument("--p", type=int)
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--full-residue", action="store_true", help="use a complete residue system mod p as the box")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("moments", parents=[flags], help="I_k or J_k moments")
    p.add_argument("--f", help="ascending coefficients, e.g. 0,0,1 for X^2")
    p.add_argument("-d", "--degree", type=int, default=1)
    p.add_argument("--H", type=int, required=True)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--p", type=int, help="give p for J_k")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("immanant", parents=[flags], help="character tables and immanants")
    p.add_argument("--table", type=int, metavar="N", help="print the character table of S_N")
    p.add_argument("--matrix", help="JSON list of rows")
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--p", type=int)
    p.set_defaults(func=cmd_immanant)

    p = sub.add_parser("exponents", parents=[flags], help="exponents of every bound")
    p.add_argument("-d", type=int, default=3)
    p.add_argument("-m", dest="m_", type=int, required=True)
    p.add_argument("-n", dest="n_", type=int, required=True)
    p.add_argument("-r", type=int, required=True)
    p.add_argument("--H", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--force", action="store_true", help="evaluate outside the stated hypotheses")
    p.add_argument("--s-mode", choices=S_MODES, default="table")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_exponents)

    p = sub.add_parser("symbolic-check", parents=[flags], help="symbolic determinant identities")
    _add_instance_args(p)
    p.set_defaults(func=cmd_symbolic)

    p = sub.add_parser("verify", parents=[flags], help="run a verification suite")
    p.add_argument("suite", choices=sorted(harness.VERIFY_SUITES))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("run", parents=[flags], help="run the experiment described by --config")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("slope", parents=[flags], help="log-log slope of I_k over an H grid")
    p.add_argument("--f")
    p.add_argument("-d", "--degree", type=int, default=3)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--H", type=int, nargs="+", default=[256, 512, 1024, 2048])
    p.add_argument("--bound", help="pass when the slope is at most this (e.g. 2.4 or 19/5)")
    p.set_defaults(func=cmd_slope)
    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.shards < 1:
        print("error: --shards must be >= 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ConfigError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
