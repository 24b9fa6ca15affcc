"""Batch command-line interface; every command writes one JSON report.

Exit status: 0 when every check passes, 1 when a check fails, 2 on usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
import time
from fractions import Fraction

from . import __version__
from .ball import DEFAULT_PREC
from .errors import LemmaViolation, PadeBrocardError, UnknownLemma
from .kernel import Poly
from .report import SCHEMA_VERSION, CheckReport, jsonable

PREC_ENV = "PADEBROCARD_PREC"


class UsageError(Exception):
    pass


def parse_rational(text: str) -> Fraction:
    """Exact rational from "p/q" or an integer literal; decimals are rejected."""
    t = text.strip()
    if any(ch in t for ch in ".eE"):
        raise argparse.ArgumentTypeError(f"{text!r}: give rationals as p/q, not decimals")
    try:
        return Fraction(t)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not a rational p/q") from exc


def parse_poly(text: str) -> Poly:
    """Comma-separated integer coefficients, constant term first."""
    try:
        return Poly([int(c) for c in text.split(",")])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated integer list") from exc


def parse_range(text: str) -> tuple[int, int]:
    try:
        a, b = text.split(":")
        return int(a), int(b)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not a range a:b") from exc


def _default_prec() -> int:
    raw = os.environ.get(PREC_ENV)
    if raw is None:
        return DEFAULT_PREC
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{PREC_ENV} must be an integer, got {raw!r}")


class Run:
    """Collects reports, results and timings for one command."""

    def __init__(self, command: str, config: dict):
        self.command = command
        self.config = config
        self.reports: list[CheckReport] = []
        self.result: dict = {}
        self.timings: dict[str, float] = {}

    def timed(self, name, fn, *args, **kwargs):
        t0 = time.perf_counter()
        try:
            return fn(*args, **kwargs)
        finally:
            self.timings[name] = round(time.perf_counter() - t0, 6)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def to_json(self, timings: bool = True) -> dict:
        first = next((r.first_failure() for r in self.reports if not r.passed), None)
        out = {
            "schema_version": SCHEMA_VERSION,
            "version": __version__,
            "command": self.command,
            "config": jsonable(self.config),
            "passed": self.passed,
            "first_failure": None if first is None else first.to_json(),
            "reports": [r.to_json() for r in self.reports],
            "result": jsonable(self.result),
        }
        if timings:
            out["timings"] = self.timings
        return out


# -- shared option groups -------------------------------------------------------

def _add_cfg(p, D=10):
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--b1", type=int, default=None, help="beta1 (default r)")
    p.add_argument("--b2", type=int, default=None, help="beta2 (default 2r)")
    p.add_argument("--M", type=int, default=None, help="product cutoff (default beta2)")
    p.add_argument("--D", type=int, default=D)
    p.add_argument("--eps0", type=parse_rational, default=Fraction(1, 2))


def _cfg(args):
    from .pade import PadeConfig

    b1 = args.r if args.b1 is None else args.b1
    b2 = 2 * args.r if args.b2 is None else args.b2
    M = b2 if args.M is None else args.M
    return PadeConfig(args.r, b1, b2, M, args.D, args.eps0)


def _family(run: Run, cfg, k_max: int):
    from .forge import build_family, make_context
    from .pade import build_initial_pade

    triple = run.timed("pade", build_initial_pade, cfg)
    ctx = make_context(cfg.r, cfg.M_cap, cfg.beta1, cfg.beta2)
    family = run.timed("family", build_family, ctx, triple, k_max)
    return triple, ctx, family


# -- commands ----------------------------------------------------------------------

def cmd_omega(args, run: Run):
    from .omega import OmegaSpec, omega_coeff_checks, omega_eval_ball, omega_series

    spec = OmegaSpec(args.r, args.beta)
    series = run.timed("series", omega_series, spec, args.order)
    run.result["coefficients"] = list(series.coeffs)
    run.reports.append(omega_coeff_checks(spec, args.order, strict=False))
    if args.alpha is not None:
        run.result["value"] = omega_eval_ball(spec, args.alpha, args.prec)


def cmd_pade(args, run: Run):
    from .pade import build_initial_pade, check_nondegenerate, check_pade_bounds

    cfg = _cfg(args)
    triple = run.timed("build", build_initial_pade, cfg)
    run.reports.append(run.timed("check", check_pade_bounds, triple, strict=False))
    run.reports.append(check_nondegenerate(triple, strict=False))
    run.result["triple"] = triple.to_json()


def cmd_derive(args, run: Run):
    from .forge import check_bracket_relation, check_family_laws, check_leibniz_agreement, check_series_identity

    cfg = _cfg(args)
    triple, ctx, family = _family(run, cfg, args.kmax)
    L = cfg.order + cfg.D if args.L is None else args.L
    run.reports.append(check_family_laws(ctx, family, strict=False))
    run.reports.append(check_bracket_relation(ctx, family, strict=False))
    run.reports.append(run.timed("leibniz", check_leibniz_agreement, ctx, family, strict=False))
    run.reports.append(run.timed("series", check_series_identity, ctx, triple, family, args.kmax, L, strict=False))
    run.result["degrees"] = [[p.degree for p in row] for row in family.square]


def cmd_certify(args, run: Run):
    from .certify import delta_rank_report

    cfg = _cfg(args)
    triple, ctx, family = _family(run, cfg, 2)
    alphas = [Fraction(1, n) for n in args.n0]
    rep, certs = run.timed("certify", delta_rank_report, ctx, family, cfg, alphas, strict=False)
    run.reports.append(rep)
    run.result["certificates"] = [c.to_json() for c in certs]


def cmd_pipeline(args, run: Run):
    from .pipeline import chi, compute_params, run_desk_pipeline

    if args.mode == "asymptotic":
        if args.N is None or args.theta is None:
            raise UsageError("asymptotic mode needs --N and --theta")
        params = run.timed(
            "params",
            compute_params,
            args.N,
            args.script_N,
            args.theta,
            args.eps0,
            args.r,
            args.s,
            args.b_const,
            mode="asymptotic",
            prec=args.prec,
        )
        run.result["params"] = params.to_json()
        val, lead = chi(params)
        run.result["chi"] = val
        run.result["chi_leading"] = lead
        rep = CheckReport("pipeline-params")
        rep.add("log(W/C) > 0", params.log_W_over_C.is_positive())
        rep.add("D >= 1", params.D is not None and params.D >= 1, D=params.D)
        run.reports.append(rep)
        return
    cfg = _cfg(args)
    n0 = args.n0[0]
    res = run.timed("pipeline", run_desk_pipeline, cfg, n0, args.N, args.script_N, args.b_const, strict=False)
    run.reports.append(res.report)
    run.result["params"] = res.params.to_json()
    run.result["matrix"] = res.matrix.to_json()


def cmd_scan(args, run: Run):
    from .scanner import Equation, scan

    eq = Equation(args.poly, args.s)
    lo, hi = args.range
    sols = run.timed("scan", scan, eq, lo, hi, workers=args.threads, prefilter=args.prefilter)
    run.result["solutions"] = [s.to_json() for s in sols]
    run.result["count"] = len(sols)
    if args.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "x", "digits_of_value"])
        for s in sols:
            d = s.to_json()
            w.writerow([d["n"], d["x"], d["digits_of_value"]])
        with open(args.csv, "w") as fh:
            fh.write(buf.getvalue())
    if args.jsonl:
        with open(args.jsonl, "w") as fh:
            for s in sols:
                fh.write(json.dumps(s.to_json(), sort_keys=True) + "\n")


def cmd_exponent(args, run: Run):
    from .ball import root_ball
    from .pipeline import optimize_exponent

    opt = run.timed("optimize", optimize_exponent, args.prec)
    run.result.update(opt.to_json())
    sqrt2 = root_ball(2, 2, args.prec)
    rep = CheckReport("exponent")
    rep.add("eps0* = 2 - sqrt 2", opt.eps0.overlaps(2 - sqrt2))
    rep.add("theta* = 17 - 12 sqrt 2", opt.theta.overlaps(17 - 12 * sqrt2))
    rep.add("exponent = 12 sqrt 2 - 16", opt.exponent.overlaps(12 * sqrt2 - 16))
    rep.add("exponent < 33/34", opt.below_33_34)
    run.reports.append(rep)


# -- lemma dispatch ----------------------------------------------------------------

def _lemma_binom(args, run):
    from .omega import binom_denominator_checks

    run.reports.append(binom_denominator_checks(args.r, args.kmax, strict=False))


def _lemma_omega(args, run):
    from .omega import OmegaSpec, omega_coeff_checks

    betas = [args.beta] if args.beta else range(2, 13)
    for b in betas:
        run.reports.append(omega_coeff_checks(OmegaSpec(args.r, b), args.order, strict=False))


def _lemma_siegel(args, run):
    from .errors import BudgetExceeded
    from .siegel import HomogeneousSystem, brute_force_oracle, siegel_bound, solve_small

    rng = random.Random(args.seed)
    rep = CheckReport(f"siegel-bound trials={args.trials}")
    for t in range(args.trials):
        n = rng.randint(2, args.max_n)
        m = rng.randint(1, n - 1)
        rows = [[rng.randint(-args.max_a, args.max_a) for _ in range(n)] for _ in range(m)]
        if all(a == 0 for row in rows for a in row):
            rows[0][0] = 1
        sys_ = HomogeneousSystem(rows)
        x = solve_small(sys_)
        bound = siegel_bound(sys_)
        ok = any(x) and sys_.is_solution(x) and all(bound.admits(v) for v in x)
        detail = {"M": m, "N": n, "X": list(x)}
        try:
            hit = brute_force_oracle(sys_, min(bound.floor(), max(abs(v) for v in x)), budget=200_000)
            detail["oracle"] = None if hit is None else list(hit)
            ok = ok and hit is not None and max(map(abs, hit)) <= max(map(abs, x))
        except BudgetExceeded:
            detail["oracle"] = "skipped"
        rep.add(f"trial {t}", ok, **detail)
    run.reports.append(rep)


def _lemma_pade(args, run):
    cmd_pade(args, run)
    run.result["vanish_order_at_least"] = _cfg(args).order


def _lemma_series(args, run):
    from .forge import check_series_identity

    cfg = _cfg(args)
    triple, ctx, family = _family(run, cfg, args.kmax)
    L = cfg.order + cfg.D if args.L is None else args.L
    run.reports.append(check_series_identity(ctx, triple, family, args.kmax, L, strict=False))


def _lemma_relation(args, run):
    from .forge import check_bracket_relation, check_family_laws, check_leibniz_agreement

    cfg = _cfg(args)
    _, ctx, family = _family(run, cfg, args.kmax)
    run.reports.append(check_bracket_relation(ctx, family, strict=False))
    run.reports.append(check_family_laws(ctx, family, strict=False))
    run.reports.append(check_leibniz_agreement(ctx, family, strict=False))


def _lemma_angle_eval(args, run):
    from .forge import check_angle_evaluations

    cfg = _cfg(args)
    _, ctx, family = _family(run, cfg, args.kmax)
    for n in args.n0:
        run.reports.append(check_angle_evaluations(ctx, family, n, cfg.eps0, strict=False))


def _lemma_low_order(args, run):
    from .certify import delta_poly, low_order_point

    cfg = _cfg(args)
    _, _, family = _family(run, cfg, 2)
    delta = delta_poly(family)
    pts = [Fraction(1, args.n0[0] + i) for i in range(args.points)]
    pt, o = low_order_point(delta, pts)
    rep = CheckReport("low-order-point")
    rep.add("ord <= deg/t", o * len(pts) <= delta.degree, point=pt, ord=o, degree=delta.degree, t=len(pts))
    run.reports.append(rep)


LEMMAS = {
    "binom-denominator": _lemma_binom,
    "omega-coeff": _lemma_omega,
    "siegel-bound": _lemma_siegel,
    "pade-build": _lemma_pade,
    "bracket-series": _lemma_series,
    "bracket-relation": _lemma_relation,
    "angle-eval-bounds": _lemma_angle_eval,
    "delta-rank": lambda a, r: cmd_certify(a, r),
    "low-order-point": _lemma_low_order,
    "pipeline-properties": lambda a, r: cmd_pipeline(a, r),
}


def cmd_verify_lemma(args, run: Run):
    fn = LEMMAS.get(args.lemma)
    if fn is None:
        raise UnknownLemma(f"unknown lemma id {args.lemma!r}; known: {', '.join(sorted(LEMMAS))}")
    fn(args, run)


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="padebrocard", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write the JSON report here instead of stdout")
    common.add_argument("--no-timings", action="store_true", help="omit timings for byte-identical reports")
    common.add_argument("--prec", type=int, default=None, help=f"ball precision in bits (env {PREC_ENV})")
    common.add_argument("--threads", type=int, default=1)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("omega", parents=[common], help="Taylor coefficients of an omega function")
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--beta", type=int, default=2)
    p.add_argument("--order", type=int, default=10)
    p.add_argument("--alpha", type=parse_rational, default=None)
    p.set_defaults(func=cmd_omega)

    p = sub.add_parser("pade", parents=[common], help="build and check an initial Padé triple")
    _add_cfg(p)
    p.set_defaults(func=cmd_pade)

    p = sub.add_parser("derive", parents=[common], help="operator families and their identities")
    _add_cfg(p)
    p.add_argument("--kmax", type=int, default=4)
    p.add_argument("--L", type=int, default=None)
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("certify", parents=[common], help="determinant polynomial and rank-three certificates")
    _add_cfg(p, D=20)
    p.add_argument("--n0", type=int, nargs="+", default=[97])
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("pipeline", parents=[common], help="approximant matrix and its four properties")
    _add_pipeline(p)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("scan", parents=[common], help="solutions of s n! = P(x)")
    p.add_argument("--poly", type=parse_poly, required=True, help='coefficients, constant first: "-1,0,1" is x^2-1')
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--range", type=parse_range, required=True, help="n range a:b (inclusive)")
    p.add_argument("--prefilter", action="store_true")
    p.add_argument("--csv")
    p.add_argument("--jsonl")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("exponent", parents=[common], help="optimal eps0, theta and exponent")
    p.set_defaults(func=cmd_exponent)

    p = sub.add_parser("verify-lemma", parents=[common], help="run one named checker")
    p.add_argument("lemma", help=", ".join(sorted(LEMMAS)))
    _add_pipeline(p)
    p.add_argument("--beta", type=int, default=None)
    p.add_argument("--order", type=int, default=60)
    p.add_argument("--kmax", type=int, default=None)
    p.add_argument("--L", type=int, default=None)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-n", type=int, default=8)
    p.add_argument("--max-a", type=int, default=20)
    p.set_defaults(func=cmd_verify_lemma)
    return parser


def _add_pipeline(p):
    _add_cfg(p, D=20)
    p.add_argument("--n0", type=int, nargs="+", default=[10**6 + 3])
    p.add_argument("--mode", choices=["desk", "asymptotic"], default="desk")
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--script-N", dest="script_N", type=int, default=None)
    p.add_argument("--theta", type=parse_rational, default=None)
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--b-const", dest="b_const", type=int, default=10**6)


def _glue_values(argv: list[str]) -> list[str]:
    """Attach values such as "-1,0,1" to their flag so they are not read as options."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok == "--poly" and i + 1 < len(argv):
            out.append(f"--poly={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def run(argv=None) -> int:
    parser = build_parser()
    argv = _glue_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.prec is None:
            args.prec = _default_prec()
        if getattr(args, "kmax", 0) is None:
            args.kmax = 8 if args.command == "verify-lemma" and args.lemma in ("bracket-series", "bracket-relation") else 4
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    config = {k: v for k, v in vars(args).items() if k not in ("func", "output", "no_timings")}
    report = Run(args.command if args.command != "verify-lemma" else f"verify-lemma {args.lemma}", config)
    code = 0
    try:
        args.func(args, report)
    except (UsageError, UnknownLemma, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2
    except LemmaViolation as exc:
        failed = CheckReport(report.command)
        failed.add("raised", False, error=str(exc), witness=exc.witness)
        report.reports.append(failed)
    except PadeBrocardError as exc:
        failed = CheckReport(report.command)
        failed.add("raised", False, error=f"{type(exc).__name__}: {exc}")
        report.reports.append(failed)
    if not report.passed:
        code = 1
    text = json.dumps(report.to_json(timings=not args.no_timings), indent=2, sort_keys=True) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())
