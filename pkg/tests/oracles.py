"""Independent reference computations used only by the tests.

None of these share code paths with the package: they go through sympy,
mpmath, a differential-equation recurrence or plain exhaustive search.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import mpmath
import sympy

X = sympy.Symbol("x")


def omega_by_ode(r: int, beta: int, order: int) -> list[Fraction]:
    """Coefficients of prod_{j<beta}(1-jx)^(-1/r) from d*w' = a*w.

    d = prod (1 - j x), a = sum_j (j/r) prod_{l != j} (1 - l x).
    """
    d = sympy.Poly(sympy.prod([1 - j * X for j in range(1, beta)]), X)
    a = sympy.Poly(
        sum(sympy.Rational(j, r) * sympy.prod([1 - l * X for l in range(1, beta) if l != j]) for j in range(1, beta)),
        X,
    )
    dc = [Fraction(int(c.p), int(c.q)) for c in reversed(d.all_coeffs())]
    ac = [Fraction(int(c.p), int(c.q)) for c in reversed(a.all_coeffs())]
    b = [Fraction(1)]
    for n in range(order):
        rhs = sum(ac[k] * b[n - k] for k in range(len(ac)) if 0 <= n - k)
        rhs -= sum(dc[k] * (n - k + 1) * b[n - k + 1] for k in range(1, len(dc)) if 0 <= n - k + 1 <= n)
        b.append(rhs / (n + 1))
    return b


def sympy_binom(r: int, k: int) -> Fraction:
    c = sympy.binomial(sympy.Rational(-1, r), k)
    return Fraction(int(c.p), int(c.q))


def to_sympy(poly) -> sympy.Expr:
    return sum(sympy.Rational(str(c)) * X**i for i, c in enumerate(poly.coeffs))


def from_sympy(expr) -> list[Fraction]:
    p = sympy.Poly(sympy.expand(expr), X)
    return [Fraction(int(c.p), int(c.q)) for c in reversed(p.all_coeffs())]


def angle_bracket_symbolic(P, r: int, beta: int, M: int, k: int) -> list[Fraction]:
    """T^k/k! * (P w)^(k) / w computed symbolically with sympy."""
    w = sympy.prod([(1 - j * X) ** sympy.Rational(-1, r) for j in range(1, beta)]) if beta > 1 else sympy.Integer(1)
    T = r * sympy.prod([1 - j * X for j in range(1, M + 1)])
    expr = T**k / sympy.factorial(k) * sympy.diff(to_sympy(P) * w, X, k) / w
    expr = sympy.cancel(sympy.simplify(expr))
    coeffs = from_sympy(expr)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def mp_ln(q, dps: int = 120):
    with mpmath.workdps(dps):
        return mpmath.log(mpmath.mpf(Fraction(q).numerator) / Fraction(q).denominator)


def mp_value(q, dps: int = 120):
    with mpmath.workdps(dps):
        q = Fraction(q)
        return mpmath.mpf(q.numerator) / q.denominator


def exhaustive_kernel_min(rows, box: int):
    """Minimal max-norm nonzero integer solution in [-box, box]^N, or None."""
    n = len(rows[0])
    best = None
    for x in itertools.product(range(-box, box + 1), repeat=n):
        if any(x) and all(sum(a * b for a, b in zip(row, x)) == 0 for row in rows):
            m = max(map(abs, x))
            if best is None or m < best:
                best = m
    return best


def exhaustive_preimage(coeffs, value: int, bound: int) -> list[int]:
    return [x for x in range(bound + 1) if sum(c * x**i for i, c in enumerate(coeffs)) == value]


def brocard_style_scan(coeffs, s: int, n_lo: int, n_hi: int, x_max: int) -> list[tuple[int, int]]:
    """Naive scan: every x up to x_max, every n in range."""
    vals = {}
    for x in range(x_max + 1):
        vals.setdefault(sum(c * x**i for i, c in enumerate(coeffs)), []).append(x)
    out = []
    for n in range(n_lo, n_hi + 1):
        for x in vals.get(s * math.factorial(n), []):
            out.append((n, x))
    return out
