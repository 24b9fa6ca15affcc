"""Parameter block, approximant matrix at alpha = 1/n0, and the exponent optimisation.

Two modes are supported.  In asymptotic mode M = floor(N^theta) and D comes from
the closed-form parameter formula; this only makes sense for astronomically
large N.  In desk mode M, D, n0 and eps0 are free inputs, N and the window
start default to n0, and the count hypothesis that selects n0 is not
modelled; every lemma-level check remains meaningful there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .ball import Ball, iroot, log_ball, root_ball
from .certify import IndependenceCertificate, det3, rank3_certificate
from .errors import DegenerateParams, FloorAmbiguous, PreconditionFailed, ThetaTooLarge
from .forge import build_family, make_context
from .kernel import exact
from .omega import omega_eval_ball
from .pade import PadeConfig, PadeTriple, build_initial_pade, coefficient_bound_log, remainder_series
from .report import CheckReport

MAX_PREC = 1 << 16
EXACT_FACTORIAL_LIMIT = 2000


def exponent_function(eps0):
    """eps0 (1 - eps0) / ((3 - eps0)(4 - eps0)); works on Fractions and balls."""
    return eps0 * (1 - eps0) / ((3 - eps0) * (4 - eps0))


def log_factorial_ball(n: int, prec: int = 128) -> Ball:
    """Enclosure of ln(n!).

    Small n use the exact factorial.  Larger n use Stirling's series with
    Robbins' two-sided remainder 1/(12n+1) < r_n < 1/(12n).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n <= EXACT_FACTORIAL_LIMIT:
        return log_ball(math.factorial(n), prec)
    ln_n = log_ball(n, prec)
    base = ln_n * n - n + (log_ball(2 * n, prec) + Ball.pi(prec).log()) * Fraction(1, 2)
    lo = base.lower() + Fraction(1, 12 * n + 1)
    hi = base.upper() + Fraction(1, 12 * n)
    return Ball.from_bounds(lo, hi, prec)


@dataclass
class PipelineParams:
    N: int
    script_N: int
    theta: Fraction | None
    eps0: Fraction
    M: int
    r: int
    s: int
    b_const: int
    mode: str
    logs: dict[str, Ball]
    exprs: dict[str, str]
    D: int | None
    prec: int

    @property
    def log_W_over_C(self) -> Ball:
        return self.logs["W"] - self.logs["C"]

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "N": self.N,
            "script_N": self.script_N,
            "theta": None if self.theta is None else str(self.theta),
            "eps0": str(self.eps0),
            "M": self.M,
            "r": self.r,
            "s": self.s,
            "b_const": self.b_const,
            "D": self.D,
            "log": {k: v.to_json() for k, v in self.logs.items()},
            "expr": dict(self.exprs),
        }


def _param_logs(r: int, M: int, script_N: int, eps0: Fraction, prec: int) -> dict[str, Ball]:
    e = eps0
    ln = lambda q: log_ball(q, prec)  # noqa: E731
    return {
        "c": ln(2 * r * script_N) * M**5,
        "C": ln(2 * script_N),
        "u": ln(4 * r * script_N) * M**4 + ln(10) * (M / e),
        "U": ln(4 * r**4 * M) * ((2 - e) * (3 - e) / e),
        "w": ln(2 * r * script_N) * (2 * M**4) + ln(4) * (M / e),
        "W": ln(script_N) * (3 - e) - ln(16 * r**4 * M) * (2 * (3 - e) / e),
    }


_EXPRS = {
    "c": "(2 r NN)^(M^5)",
    "C": "2 NN",
    "u": "(4 r NN)^(M^4) 10^(M/eps0)",
    "U": "(4 r^4 M)^((2-eps0)(3-eps0)/eps0)",
    "w": "(2 r NN)^(2 M^4) 4^(M/eps0)",
    "W": "NN^(3-eps0) / (16 r^4 M)^(2(3-eps0)/eps0)",
}


def _floor_certified(make, prec: int) -> tuple[int, int]:
    while prec <= MAX_PREC:
        try:
            return make(prec).floor(), prec
        except FloorAmbiguous:
            prec *= 2
    raise FloorAmbiguous("floor undecided at the precision cap")


def _positive_certified(make, prec: int) -> bool | None:
    """True/False once the sign is certified; None if still undecided at the cap."""
    while prec <= MAX_PREC:
        b = make(prec)
        if b.is_positive():
            return True
        if b.upper() <= 0:
            return False
        prec *= 2
    return None


def compute_params(
    N: int,
    script_N: int | None = None,
    theta=None,
    eps0=Fraction(1, 2),
    r: int = 2,
    s: int = 1,
    b_const: int = 10**6,
    mode: str = "asymptotic",
    M: int | None = None,
    slack=0,
    prec: int = 128,
) -> PipelineParams:
    eps0 = Fraction(exact(eps0))
    script_N = N if script_N is None else script_N
    if r < 2 or N < 2 or b_const <= 0:
        raise ValueError("need r >= 2, N >= 2 and b_const > 0")
    if not (Fraction(1, 100) <= eps0 <= Fraction(99, 100)):
        raise ValueError(f"eps0 must lie in [1/100, 99/100], got {eps0}")
    if not (N <= script_N < 2 * N):
        raise ValueError(f"window start must lie in [N, 2N), got {script_N}")
    theta = None if theta is None else Fraction(exact(theta))
    if mode == "asymptotic":
        if theta is None:
            raise ValueError("asymptotic mode needs theta")
        if not (Fraction(1, 1000) <= theta <= Fraction(1, 20)):
            raise ValueError(f"theta must lie in [1/1000, 1/20], got {theta}")
        limit = exponent_function(eps0) - Fraction(exact(slack))
        if theta > limit:
            raise ThetaTooLarge(f"theta = {theta} exceeds eps0(1-eps0)/((3-eps0)(4-eps0)) - slack = {limit}")
        M = iroot(N**theta.numerator, theta.denominator)
    elif mode == "desk":
        if M is None:
            raise ValueError("desk mode needs M")
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if M < 1:
        raise DegenerateParams(f"M = {M} must be >= 1")

    logs = _param_logs(r, M, script_N, eps0, prec)
    positive = _positive_certified(lambda p: _param_logs(r, M, script_N, eps0, p)["W"] - _param_logs(r, M, script_N, eps0, p)["C"], prec)
    D = None
    if positive:
        window, _ = _floor_certified(lambda p: Ball.exact(N, p) / log_ball(N, p), prec)

        def d_ball(p):
            lg = _param_logs(r, M, script_N, eps0, p)
            num = log_ball(b_const, p) + lg["c"] + lg["w"] + log_factorial_ball(script_N + window, p) / r
            return num / (lg["W"] - lg["C"])

        fl, _ = _floor_certified(d_ball, prec)
        D = 1 + fl
        if D < 1:
            raise DegenerateParams(f"D = {D} must be >= 1")
    elif mode == "asymptotic":
        raise DegenerateParams("W/C is not > 1, so D is undefined" if positive is False else "sign of log(W/C) undecided")
    return PipelineParams(N, script_N, theta, eps0, M, r, s, b_const, mode, logs, dict(_EXPRS), D, prec)


def chi_leading(theta, eps0):
    """(1 + theta (2-eps0)(3-eps0)/eps0) / (2 - eps0 - theta 2(3-eps0)/eps0); Fractions or balls."""
    den = 2 - eps0 - theta * 2 * (3 - eps0) / eps0
    positive = den > 0 if not isinstance(den, Ball) else den.is_positive()
    if not positive:
        raise DegenerateParams(f"leading-order log(W/C) is not positive for theta={theta}, eps0={eps0}")
    return (1 + theta * (2 - eps0) * (3 - eps0) / eps0) / den


def chi(params: PipelineParams) -> tuple[Ball, object]:
    """Enclosure of log(CU)/log(W/C), together with the leading-order form (if theta is known)."""
    lwc = params.log_W_over_C
    if not lwc.is_positive():
        raise DegenerateParams("log(W/C) is not certified positive")
    val = (params.logs["C"] + params.logs["U"]) / lwc
    lead = None if params.theta is None else chi_leading(params.theta, params.eps0)
    return val, lead


@dataclass(frozen=True)
class ExponentOptimum:
    eps0: Ball
    theta: Ball
    exponent: Ball
    critical_quadratic: tuple
    below_33_34: bool

    def to_json(self) -> dict:
        return {
            "eps0": self.eps0.to_json(),
            "theta": self.theta.to_json(),
            "exponent": self.exponent.to_json(),
            "critical_quadratic": [str(c) for c in self.critical_quadratic],
            "exponent_below_33/34": self.below_33_34,
        }


def optimize_exponent(prec: int = 128) -> ExponentOptimum:
    """Maximise eps (1-eps)/((3-eps)(4-eps)) over (0,1) through its critical point."""
    from .kernel import Poly

    num = Poly([0, 1, -1])
    den = Poly([12, -7, 1])
    crit = num.derivative() * den - num * den.derivative()
    if crit.degree != 2:
        raise AssertionError("critical-point equation is not quadratic")
    c0, c1, c2 = (Fraction(c) for c in crit.coeffs)
    disc = c1 * c1 - 4 * c2 * c0
    sq = root_ball(disc, 2, prec)
    roots = [(-c1 + sq) / (2 * c2), (-c1 - sq) / (2 * c2)]
    inside = [x for x in roots if x.lower() > 0 and x.upper() < 1]
    if len(inside) != 1:
        raise AssertionError("expected exactly one critical point in (0, 1)")
    eps = inside[0]
    # the critical point is a maximum: f vanishes at both ends and is positive inside
    theta = exponent_function(eps)
    exponent = 1 - theta
    below = exponent.upper() < Fraction(33, 34)
    return ExponentOptimum(eps, theta, exponent, (c0, c1, c2), below)


@dataclass
class ApproximantMatrix:
    p: list[list[Fraction]]
    Z: int
    n0: int
    certificate: IndependenceCertificate
    residuals: list[Ball] = field(default_factory=list)

    @property
    def det(self) -> Fraction:
        return det3([[self.p[i][j] for i in range(3)] for j in range(3)])

    def to_json(self) -> dict:
        return {
            "n0": self.n0,
            "Z": self.Z,
            "p": [[str(x) for x in row] for row in self.p],
            "det": str(self.det),
            "certificate": self.certificate.to_json(),
            "residuals": [b.to_json() for b in self.residuals],
        }


def build_approximants(ctx, triple: PadeTriple, family, certificate: IndependenceCertificate, n0: int) -> ApproximantMatrix:
    alpha = Fraction(1, n0)
    if certificate.alpha != alpha:
        raise PreconditionFailed(f"certificate is for alpha = {certificate.alpha}, not 1/{n0}")
    ks = certificate.indices
    if family.k_max < max(ks):
        family = build_family(ctx, triple, max(ks))
    p = [[Fraction(family.angle[ks[j]][i](alpha)) for j in range(3)] for i in range(3)]
    a = certificate.a
    Z = ctx.r ** (a + 2) * n0 ** (triple.cfg.D + (a + 2) * ctx.M_cap)
    return ApproximantMatrix(p, Z, n0, certificate)


def _residual_ball(matrix: ApproximantMatrix, cfg: PadeConfig, j: int, prec: int) -> Ball:
    alpha = Fraction(1, matrix.n0)
    s1, s2 = cfg.omegas
    w = [Ball.exact(1, prec), omega_eval_ball(s1, alpha, prec), omega_eval_ball(s2, alpha, prec)]
    acc = Ball.exact(0, prec)
    for i in range(3):
        acc = acc + Ball.exact(matrix.p[i][j], prec) * w[i]
    return acc


def tail_chain_bound(triple: PadeTriple, n0: int, a: int, script_N: int, prec: int, window: int | None = None) -> Ball:
    """(2 r NN)^(a+2) [sum_{O<=v<=L} |r_v| (2 alpha)^v + B sum_{v>L} (4 M alpha)^v].

    B is the coefficient-bound constant, so the geometric tail uses |r_v| <= B (2M)^v.
    The exact window runs to L = window, or to the triple's own window if that is larger.
    """
    cfg = triple.cfg
    alpha = Fraction(1, n0)
    rem = triple.remainder
    if window is not None and window > rem.order:
        rem = remainder_series(triple, cfg, window)
    L = rem.order
    exact_part = sum((abs(Fraction(rem[v])) * (2 * alpha) ** v for v in range(cfg.order, L + 1)), Fraction(0))
    q = 4 * cfg.M_cap * alpha
    if q >= 1:
        raise DegenerateParams(f"geometric tail needs 4 M alpha < 1, got {q}")
    logB = coefficient_bound_log(cfg, 0, prec)
    tail = logB.exp() * (q ** (L + 1) / (1 - q))
    return (tail + exact_part) * Fraction(2 * cfg.r * script_N) ** (a + 2)


def chain_window(triple: PadeTriple, n0: int, prec: int = 128, max_factor: int = 16) -> int:
    """Smallest doubling of the exact window at which the geometric tail stops dominating.

    With only the construction window the crude coefficient bound B swamps
    the exact terms, and the chain bound says nothing about the residual.
    """
    cfg = triple.cfg
    alpha = Fraction(1, n0)
    q = 4 * cfg.M_cap * alpha
    if q >= 1:
        raise DegenerateParams(f"geometric tail needs 4 M alpha < 1, got {q}")
    logB = coefficient_bound_log(cfg, 0, prec)
    L = triple.remainder.order
    while True:
        rem = remainder_series(triple, cfg, L)
        exact_part = sum((abs(Fraction(rem[v])) * (2 * alpha) ** v for v in range(cfg.order, L + 1)), Fraction(0))
        tail = logB.exp() * (q ** (L + 1) / (1 - q))
        if tail.upper() <= exact_part or L >= max_factor * cfg.order:
            return L
        L *= 2


def verify_properties(matrix: ApproximantMatrix, params: PipelineParams, triple: PadeTriple, strict: bool = True, margin: int = 10) -> CheckReport:
    """Properties 1-4 for the approximant matrix, plus the tail-chain cross-check of property 4."""
    cfg = triple.cfg
    D = cfg.D
    rep = CheckReport(f"pipeline-properties n0={matrix.n0} D={D}")
    det = matrix.det
    rep.add("property 1: det p != 0", det != 0, det=det)

    integral = all((matrix.Z * x).denominator == 1 for row in matrix.p for x in row)
    rep.add("property 2: Z p_ij integral", integral, Z=matrix.Z)

    def z_log(p):
        a = matrix.certificate.a
        return log_ball(cfg.r, p) * (a + 2) + log_ball(matrix.n0, p) * (D + (a + 2) * cfg.M_cap)

    def cC_log(p):
        lg = _param_logs(params.r, params.M, params.script_N, params.eps0, p)
        return lg["c"] + lg["C"] * D

    rep.add("property 2: Z <= c C^D", _le(z_log, cC_log, params.prec), D=D)

    def uU_log(p):
        lg = _param_logs(params.r, params.M, params.script_N, params.eps0, p)
        return lg["u"] + lg["U"] * D

    for i in range(3):
        for j in range(3):
            x = abs(matrix.p[i][j])
            ok = x == 0 or _le(lambda p, x=x: log_ball(x, p), uU_log, params.prec)
            rep.add(f"property 3: |p_{i},{j}| <= u U^D", ok)

    a = matrix.certificate.a
    window = chain_window(triple, matrix.n0)
    residuals = []
    for j in range(3):
        prec = max(params.prec, 256)
        while True:
            res = _residual_ball(matrix, cfg, j, prec)
            chain = tail_chain_bound(triple, matrix.n0, a, params.script_N, prec, window)
            gap = chain.lower() - abs(res.center)
            if gap > 0 and margin * res.radius <= gap:
                break
            if res.mig() > chain.upper() or prec >= MAX_PREC:
                break
            prec *= 2
        residuals.append(res)
        gap = chain.lower() - abs(res.center)
        ok = gap > 0 and margin * res.radius <= gap
        rep.add(
            f"property 4 tail chain j={j}",
            ok,
            residual=res,
            chain_bound=chain,
            window=window,
            precision=prec,
        )

        def res_log(p, res=res):
            return Ball.from_bounds(max(res.mag(), Fraction(1, 1 << 60000)), res.mag(), p).log()

        def wW_log(p):
            lg = _param_logs(params.r, params.M, params.script_N, params.eps0, p)
            return lg["w"] - lg["W"] * D

        ok4 = res.mag() == 0 or _le(res_log, wW_log, params.prec)
        rep.add(f"property 4: |residual_{j}| <= w W^-D", ok4)
    matrix.residuals = residuals
    if strict:
        from .errors import PropertyViolation

        bad = rep.first_failure()
        if bad is not None:
            raise PropertyViolation(f"{rep.title}: {bad.name} failed", witness=bad.to_json())
    return rep


def _le(make_lhs, make_rhs, prec: int) -> bool:
    from .ball import decide_le

    return decide_le(make_lhs, make_rhs, prec=max(prec, 64), max_prec=MAX_PREC)


@dataclass
class PipelineRun:
    params: PipelineParams
    triple: PadeTriple
    matrix: ApproximantMatrix
    report: CheckReport


def run_desk_pipeline(cfg: PadeConfig, n0: int, N: int | None = None, script_N: int | None = None, b_const: int = 10**6, strict: bool = True) -> PipelineRun:
    """Construct and verify the approximant matrix in desk mode."""
    N = n0 if N is None else N
    script_N = N if script_N is None else script_N
    if not (N <= n0 < 2 * N):
        raise PreconditionFailed(f"n0 = {n0} must lie in [N, 2N)")
    params = compute_params(N, script_N, None, cfg.eps0, cfg.r, 1, b_const, mode="desk", M=cfg.M_cap)
    triple = build_initial_pade(cfg)
    ctx = make_context(cfg.r, cfg.M_cap, cfg.beta1, cfg.beta2)
    family = build_family(ctx, triple, 2)
    cert = rank3_certificate(ctx, family, Fraction(1, n0), cfg)
    family = build_family(ctx, triple, max(2, cert.a + 2))
    matrix = build_approximants(ctx, triple, family, cert, n0)
    rep = verify_properties(matrix, params, triple, strict=strict)
    return PipelineRun(params, triple, matrix, rep)
