"""Integer solutions of s*n! = P(x), the depressing substitution, and approximation witnesses."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .ball import Ball, iroot, log_ball
from .errors import DegreeMismatch, NotASolutionTriple
from .kernel import Poly
from .omega import OmegaSpec, omega_eval_ball

# primes for the optional quadratic-residue prefilter
PREFILTER_PRIMES = (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73)
SMALL_TABLE_LIMIT = 1 << 21


@dataclass(frozen=True)
class Equation:
    P: Poly
    s: int = 1

    def __post_init__(self):
        if not isinstance(self.P, Poly):
            object.__setattr__(self, "P", Poly(self.P))
        if not self.P.is_integral():
            raise ValueError("P must have integer coefficients")
        if self.P.degree < 2:
            raise ValueError(f"P must have degree >= 2, got {self.P.degree}")
        if self.s == 0:
            raise ValueError("s must be nonzero")

    @property
    def r(self) -> int:
        return self.P.degree

    @cached_property
    def monotone_from(self) -> int:
        """X* = 1 + 2 sum_{i<r} |a_i| / |a_r|, rounded up; P is strictly monotone on [X*, oo)."""
        lead = abs(self.P.leading())
        tail = sum(abs(c) for c in self.P.coeffs[:-1])
        return 1 + -(-2 * tail // lead)

    @cached_property
    def _small_values(self) -> dict[int, list[int]]:
        table: dict[int, list[int]] = {}
        for x in range(self.monotone_from):
            table.setdefault(self.P(x), []).append(x)
        return table

    def to_json(self) -> dict:
        return {"P": [str(c) for c in self.P.coeffs], "s": self.s}


@dataclass(frozen=True)
class Solution:
    n: int
    x: int
    value: int

    def to_json(self) -> dict:
        return {"n": self.n, "x": self.x, "digits_of_value": len(str(abs(self.value)))}


def depress(eq: Equation) -> tuple[Equation, int, tuple[int, int]]:
    """R(y) = t P((y - a_{r-1})/(r a_r)) with t = (r a_r)^(2r); zero y^(r-1) term.

    Returns (R as an equation with multiplier s*t, t, (r a_r, a_{r-1})), so that
    s n! = P(x) implies s t n! = R(r a_r x + a_{r-1}).
    """
    P, r = eq.P, eq.r
    ar, ar1 = P.leading(), P[r - 1]
    lead = r * ar
    t = lead ** (2 * r)
    R = P.compose(Poly([Fraction(-ar1, lead), Fraction(1, lead)])) * t
    if not R.is_integral():
        raise AssertionError("depressed polynomial is not integral")
    if R[r - 1] != 0:
        raise AssertionError("depressed polynomial keeps a y^(r-1) term")
    if R.compose(Poly([ar1, lead])) != P * t:
        raise AssertionError("R(r a_r x + a_{r-1}) != t P(x)")
    return Equation(R, eq.s * t), t, (lead, ar1)


def integer_preimage(eq: Equation, value: int) -> list[int]:
    """All integers x >= 0 with P(x) = value, in increasing order.

    Below X* the polynomial is tabulated once per equation; from X* on it is
    strictly monotone and a bracket around the integer r-th root of
    value/a_r is bisected with exact evaluation.
    """
    P = eq.P
    xs = list(eq._small_values.get(value, [])) if eq.monotone_from <= SMALL_TABLE_LIMIT else [
        x for x in range(eq.monotone_from) if P(x) == value
    ]
    lo = eq.monotone_from
    sign = 1 if P.leading() > 0 else -1
    f = lambda x: sign * (P(x) - value)  # noqa: E731  increasing on [lo, oo)
    if f(lo) > 0:
        return xs
    if f(lo) == 0:
        return xs + [lo]
    q = value // P.leading()
    guess = iroot(q, eq.r) if q > 0 else lo
    a = max(lo, guess - 2)
    step = 2
    while f(a) > 0:
        a = max(lo, a - step)
        step *= 2
    b = max(a + 1, guess + 2)
    step = 2
    while f(b) < 0:
        a, b = b, b + step
        step *= 2
    # invariant: f(a) <= 0 <= f(b)
    while b - a > 1:
        m = (a + b) // 2
        if f(m) <= 0:
            a = m
        else:
            b = m
    for x in (a, b):
        if f(x) == 0 and x not in xs:
            xs.append(x)
    return sorted(xs)


def _qr_tables():
    return {p: {(k * k) % p for k in range(p)} for p in PREFILTER_PRIMES}


def _prefilter_shift(eq: Equation) -> int | None:
    """d if P = x^2 + d (the only shape the prefilter handles), else None."""
    c = eq.P.coeffs
    if len(c) == 3 and c[1] == 0 and c[2] == 1:
        return c[0]
    return None


def _scan_chunk(args) -> list[Solution]:
    eq, n_lo, n_hi, prefilter = args
    out = []
    fact = math.factorial(n_lo)
    shift = _prefilter_shift(eq) if prefilter else None
    qr = _qr_tables() if shift is not None else None
    for n in range(n_lo, n_hi + 1):
        if n > n_lo:
            fact *= n
        value = eq.s * fact
        if shift is not None:
            target = value - shift
            if target < 0 or any(target % p not in qr[p] for p in PREFILTER_PRIMES):
                continue
        for x in integer_preimage(eq, value):
            out.append(Solution(n, x, value))
    return out


def scan(eq: Equation, n_lo: int, n_hi: int, workers: int = 1, chunk: int = 250, prefilter: bool = False) -> list[Solution]:
    """All solutions (n, x) with n_lo <= n <= n_hi and x >= 0, ordered by n then x."""
    if n_lo < 1:
        raise ValueError("n_lo must be >= 1")
    if n_hi < n_lo:
        return []
    bounds = [(a, min(a + chunk - 1, n_hi)) for a in range(n_lo, n_hi + 1, chunk)]
    jobs = [(eq, a, b, prefilter) for a, b in bounds]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_scan_chunk, jobs))
    else:
        parts = [_scan_chunk(j) for j in jobs]
    sols = [s for part in parts for s in part]
    for sol in sols:
        if eq.P(sol.x) != eq.s * math.factorial(sol.n):
            raise AssertionError(f"reported solution {sol} does not satisfy the equation")
    return sols


@dataclass(frozen=True)
class ApproxWitness:
    n: int
    betas: tuple[int, int]
    x: int
    xs: tuple[int, int]
    p: tuple[int, int]
    rho: Ball
    exponent: Ball | None

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "betas": list(self.betas),
            "x": self.x,
            "x_i": list(self.xs),
            "p_i": list(self.p),
            "rho": self.rho.to_json(),
            "exponent": None if self.exponent is None else self.exponent.to_json(),
        }


def simul_approx_witness(eq: Equation, n: int, beta1: int, beta2: int, x: int, x1: int, x2: int, prec: int = 128, max_prec: int = 1 << 14) -> ApproxWitness:
    """p_i = n^(beta_i/r) x_i and rho = max_i |w_i(1/n) - p_i/x| for a verified solution triple."""
    r = eq.r
    if beta1 % r or beta2 % r:
        raise DegreeMismatch(f"r = {r} must divide beta1 = {beta1} and beta2 = {beta2}")
    if not (r <= beta1 < beta2 < n):
        raise ValueError(f"need r <= beta1 < beta2 < n, got {beta1}, {beta2}, n={n}")
    checks = [(n, x), (n - beta1, x1), (n - beta2, x2)]
    for m, y in checks:
        if eq.P(y) != eq.s * math.factorial(m):
            raise NotASolutionTriple(f"P({y}) != s*{m}!")
    p = tuple(n ** (b // r) * xi for b, xi in ((beta1, x1), (beta2, x2)))
    alpha = Fraction(1, n)
    while True:
        diffs = [
            abs(omega_eval_ball(OmegaSpec(r, b), alpha, prec) - Fraction(pi, x)) for b, pi in zip((beta1, beta2), p)
        ]
        rho = max(diffs, key=lambda d: d.upper())
        rho = Ball.from_bounds(max(d.lower() for d in diffs), max(d.upper() for d in diffs), prec)
        if rho.lower() > 0 and rho.radius * (1 << 20) <= rho.lower() or prec >= max_prec:
            break
        prec *= 2
    exponent = None
    if rho.lower() > 0 and x > 1:
        exponent = -rho.log() / log_ball(x, prec)
    return ApproxWitness(n, (beta1, beta2), x, (x1, x2), p, rho, exponent)


def find_synthetic_triples(c_range: range, n_max: int, betas: tuple[int, int] = (2, 4), s: int = 1) -> list[tuple[int, int, int, int, int]]:
    """(c, n, x, x1, x2) with x^2 + c = s n!, x1^2 + c = s (n-b1)!, x2^2 + c = s (n-b2)!."""
    b1, b2 = betas
    out = []
    facts = [math.factorial(k) for k in range(n_max + 1)]

    def root(v):
        if v < 0:
            return None
        y = math.isqrt(v)
        return y if y * y == v else None

    for c in c_range:
        for n in range(b2 + 1, n_max + 1):
            ys = [root(s * facts[m] - c) for m in (n, n - b1, n - b2)]
            if all(y is not None for y in ys):
                out.append((c, n, *ys))
    return out
