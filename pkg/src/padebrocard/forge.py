"""Differential operators T(d/dx + A_i) acting on the Padé polynomials.

Everything is kept polynomial: A_i only ever appears multiplied by T, and
T*A_i is an integer polynomial.  Two families are produced from a triple:

  square[k][i] = (T (d/dx + A_i))^k P_i
  angle[k][i]  = T^k/k! (d/dx + A_i)^k P_i

together with the connection polynomials q[k][j] linking them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .ball import decide_le, log_ball
from .errors import LemmaViolation
from .kernel import Poly, Series
from .omega import OmegaSpec, binom_coeff, omega_series
from .report import CheckReport


def _linear(j: int) -> Poly:
    return Poly([1, -j])


@dataclass(frozen=True)
class OperatorContext:
    r: int
    M_cap: int
    beta1: int
    beta2: int
    T: Poly
    A: tuple[tuple[Poly, Poly], ...]
    TA: tuple[Poly, Poly, Poly]

    @property
    def betas(self) -> tuple[int, int, int]:
        return 1, self.beta1, self.beta2

    @property
    def T_prime(self) -> Poly:
        return self.T.derivative()


def operator_T(r: int, M: int) -> Poly:
    """r * prod_{j=1}^{M} (1 - j x)."""
    T = Poly([r])
    for j in range(1, M + 1):
        T = T * _linear(j)
    return T


def make_context(r: int, M: int, beta1: int, beta2: int) -> OperatorContext:
    if not (2 <= r <= beta1 < beta2 <= M):
        raise ValueError(f"need 2 <= r <= beta1 < beta2 <= M, got r={r}, beta1={beta1}, beta2={beta2}, M={M}")
    factors = [_linear(j) for j in range(1, M + 1)]
    T = operator_T(r, M)

    A = [(Poly(), Poly([1]))]
    TA = [Poly()]
    for beta in (beta1, beta2):
        den = Poly([1])
        for j in range(1, beta):
            den = den * factors[j - 1]
        num = Poly()
        ta = Poly()
        for j in range(1, beta):
            others = Poly([1])
            for l in range(1, beta):
                if l != j:
                    others = others * factors[l - 1]
            num = num + others * Fraction(j, r)
            full = Poly([j])
            for l in range(1, M + 1):
                if l != j:
                    full = full * factors[l - 1]
            ta = ta + full
        # T*A_i must equal the integer polynomial built above
        quo, rem = (T * num).divmod(den)
        if not rem.is_zero() or quo != ta or not ta.is_integral() or ta.degree > M:
            raise LemmaViolation(f"T*A for beta={beta} is not the expected integer polynomial")
        A.append((num, den))
        TA.append(ta)
    return OperatorContext(r, M, beta1, beta2, T, tuple(A), tuple(TA))


def _square_step(ctx: OperatorContext, Q: Poly, i: int) -> Poly:
    return ctx.T * Q.derivative() + ctx.TA[i] * Q


def apply_square(ctx: OperatorContext, P: Poly, i: int, k: int) -> Poly:
    """(T (d/dx + A_i))^k P; integral with degree <= deg P + k M for integral P."""
    Q = P
    for _ in range(k):
        Q = _square_step(ctx, Q, i)
    if P.is_integral() and not Q.is_integral():
        raise LemmaViolation(f"square-bracket image is not integral (i={i}, k={k})")
    if not P.is_zero() and Q.degree > P.degree + k * ctx.M_cap:
        raise LemmaViolation(f"square-bracket degree {Q.degree} exceeds {P.degree} + {k}*{ctx.M_cap}")
    return Q


def _angle_chain(ctx: OperatorContext, P: Poly, i: int, k: int) -> list[Poly]:
    """u_m = T^m (d/dx + A_i)^m P for m <= k, via u_{m+1} = T u_m' - m T' u_m + T A_i u_m."""
    T, dT, TA = ctx.T, ctx.T_prime, ctx.TA[i]
    u = [P]
    for m in range(k):
        cur = u[-1]
        u.append(T * cur.derivative() - dT * cur * m + TA * cur)
    return u


def apply_angle(ctx: OperatorContext, P: Poly, i: int, k: int) -> Poly:
    """T^k/k! (d/dx + A_i)^k P; denominators divide r^k for integral P."""
    out = _angle_chain(ctx, P, i, k)[-1] / math.factorial(k)
    if P.is_integral() and ctx.r**k % out.common_denominator() != 0:
        raise LemmaViolation(f"angle-bracket denominator {out.common_denominator()} does not divide r^{k}")
    return out


@lru_cache(maxsize=1024)
def _log_derivative_weight(r: int, M: int, beta: int, ell: int) -> Poly:
    """T^ell/ell! * w^(ell)/w for w = prod_{j<beta} (1 - j x)^(-1/r), by the multinomial expansion."""
    if beta == 1:
        return Poly([1]) if ell == 0 else Poly()
    parts = beta - 1
    tail = Poly([1])
    for j in range(beta, M + 1):
        tail = tail * _linear(j) ** ell
    total = Poly()
    for comp in _compositions(ell, parts):
        coeff = Fraction(r**ell)
        term = Poly([1])
        for j, kj in enumerate(comp, start=1):
            coeff *= j**kj * (-1) ** kj * binom_coeff(r, kj)
            term = term * _linear(j) ** (ell - kj)
        total = total + term * coeff
    return total * tail


def _compositions(n: int, parts: int):
    if parts == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, parts - 1):
            yield (first,) + rest


def _scaled_derivative(P: Poly, h: int) -> Poly:
    """P^(h)/h!, with integer coefficients binom(v, h) p_v."""
    return Poly([math.comb(v, h) * P[v] for v in range(h, P.degree + 1)])


def apply_angle_leibniz(ctx: OperatorContext, P: Poly, i: int, k: int) -> Poly:
    """Independent route to apply_angle through the product-rule expansion of (P w_i)^(k)."""
    beta = ctx.betas[i]
    out = Poly()
    for ell in range(k + 1):
        h = k - ell
        out = out + ctx.T**h * _scaled_derivative(P, h) * _log_derivative_weight(ctx.r, ctx.M_cap, beta, ell)
    return out


def q_polynomials(ctx: OperatorContext, k_max: int) -> dict[int, dict[int, Poly]]:
    """q[k][j] for 1 <= j <= k <= k_max, with q[k][k] = 1."""
    return connection_polynomials(ctx.T, k_max)


def connection_polynomials(T: Poly, k_max: int) -> dict[int, dict[int, Poly]]:
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    dT = T.derivative()
    q = {1: {1: Poly([1])}}
    for k in range(1, k_max):
        nxt = {}
        for j in range(1, k + 1):
            prev = q[k].get(j - 1, Poly())
            nxt[j] = q[k][j].derivative() * T + q[k][j] * dT * j + prev
        nxt[k + 1] = Poly([1])
        q[k + 1] = nxt
    for k, row in q.items():
        for j, poly in row.items():
            if not poly.is_zero() and poly.degree > (k - j) * T.degree:
                raise LemmaViolation(f"deg q_{k},{j} = {poly.degree} exceeds {(k - j) * T.degree}")
    return q


@dataclass
class DerivedFamily:
    square: list[tuple[Poly, Poly, Poly]]
    angle: list[tuple[Poly, Poly, Poly]]
    q_table: dict[int, dict[int, Poly]]
    base_degree: int
    M_cap: int = 0

    @property
    def k_max(self) -> int:
        return len(self.square) - 1


def build_family(ctx: OperatorContext, polys, k_max: int, base_degree: int | None = None) -> DerivedFamily:
    P = tuple(polys.P if hasattr(polys, "P") else polys)
    if base_degree is None:
        base_degree = getattr(getattr(polys, "cfg", None), "D", None)
        if base_degree is None:
            base_degree = max(p.degree for p in P)
    square = [P]
    for _ in range(k_max):
        square.append(tuple(_square_step(ctx, q, i) for i, q in enumerate(square[-1])))
    chains = [_angle_chain(ctx, p, i, k_max) for i, p in enumerate(P)]
    angle = [tuple(chains[i][k] / math.factorial(k) for i in range(3)) for k in range(k_max + 1)]
    q = q_polynomials(ctx, max(k_max, 1))
    return DerivedFamily(square, angle, q, base_degree, ctx.M_cap)


def check_family_laws(ctx: OperatorContext, family: DerivedFamily, strict: bool = True) -> CheckReport:
    """Integrality and degree of square[k]; r^k denominators and degree of angle[k]."""
    rep = CheckReport(f"family-laws k<={family.k_max}")
    D = family.base_degree
    for k in range(family.k_max + 1):
        cap = D + k * ctx.M_cap
        for i in range(3):
            sq, an = family.square[k][i], family.angle[k][i]
            rep.add(f"square k={k} i={i} integral", sq.is_integral())
            rep.add(f"square k={k} i={i} degree", sq.degree <= cap, degree=sq.degree, cap=cap)
            den = an.common_denominator()
            rep.add(f"angle k={k} i={i} denominator | r^k", ctx.r**k % den == 0, denominator=den)
            rep.add(f"angle k={k} i={i} degree", an.degree <= cap, degree=an.degree, cap=cap)
    if strict:
        rep.raise_if_failed()
    return rep


def check_bracket_relation(ctx: OperatorContext, family: DerivedFamily, k_max: int | None = None, strict: bool = True) -> CheckReport:
    """k! angle[k] = square[k] - sum_{j<k} q[k][j] j! angle[j], as exact polynomials."""
    k_max = family.k_max if k_max is None else k_max
    rep = CheckReport(f"bracket-relation k<={k_max}")
    q = family.q_table
    for k in range(1, k_max + 1):
        for i in range(3):
            rhs = family.square[k][i]
            for j in range(1, k):
                rhs = rhs - q[k][j] * family.angle[j][i] * math.factorial(j)
            lhs = family.angle[k][i] * math.factorial(k)
            rep.add(f"k={k} i={i}", lhs == rhs, k=k, i=i)
    if strict:
        rep.raise_if_failed()
    return rep


def check_leibniz_agreement(ctx: OperatorContext, family: DerivedFamily, strict: bool = True) -> CheckReport:
    rep = CheckReport(f"angle-leibniz k<={family.k_max}")
    for k in range(family.k_max + 1):
        for i, p in enumerate(family.angle[0]):
            rep.add(f"k={k} i={i}", apply_angle_leibniz(ctx, p, i, k) == family.angle[k][i], k=k, i=i)
    if strict:
        rep.raise_if_failed()
    return rep


def _first_mismatch(a: Series, b: Series) -> int | None:
    n = min(a.order, b.order)
    return next((v for v in range(n + 1) if a[v] != b[v]), None)


def check_series_identity(ctx: OperatorContext, triple, family: DerivedFamily, k_max: int, L: int, strict: bool = True) -> CheckReport:
    """(T d/dx)^k R and T^k/k! R^(k) against sum_i (family)[k][i] w_i, to order L.

    Also records that angle-bracket remainders vanish at 0 to order >= O + 1 - k,
    where O is the vanishing order of R itself.
    """
    P = tuple(triple.P)
    specs = (None, OmegaSpec(ctx.r, ctx.beta1), OmegaSpec(ctx.r, ctx.beta2))
    top = L + k_max
    omegas = [Series([1], top)] + [omega_series(s, top) for s in specs[1:]]
    R = sum((omegas[i].mul_poly(P[i]) for i in range(3)), Series([0], top))
    base_val = R.valuation()
    base_vanish = top if base_val is None else base_val - 1

    rep = CheckReport(f"bracket-series k<={k_max} L={L}")
    sq_R = R
    deriv = R
    for k in range(k_max + 1):
        if k > 0:
            sq_R = sq_R.derivative().mul_poly(ctx.T)
            deriv = deriv.derivative()
        order = top - k
        ang_R = deriv.mul_poly(ctx.T**k) * Fraction(1, math.factorial(k))
        sq_sum = sum((omegas[i].truncate(order).mul_poly(family.square[k][i]) for i in range(3)), Series([0], order))
        an_sum = sum((omegas[i].truncate(order).mul_poly(family.angle[k][i]) for i in range(3)), Series([0], order))
        bad_sq = _first_mismatch(sq_R.truncate(L), sq_sum.truncate(L))
        bad_an = _first_mismatch(ang_R.truncate(L), an_sum.truncate(L))
        rep.add(f"square k={k}", bad_sq is None, k=k, first_mismatch=bad_sq)
        rep.add(f"angle k={k}", bad_an is None, k=k, first_mismatch=bad_an)
        val = ang_R.truncate(L).valuation()
        vanish = L if val is None else val - 1
        need = min(base_vanish - k, L)
        rep.add(f"angle vanishing k={k}", vanish >= need, k=k, vanish_order=vanish, required=need)
    if strict:
        rep.raise_if_failed()
    return rep


def angle_eval_bound_log(r: int, M: int, D: int, eps0, N: int, k: int, prec: int = 64):
    """ln of (2 r N)^k 10^(M/eps0) (4 r^4 M)^((2-eps0)(3-eps0) D/eps0)."""
    e = Fraction(eps0)
    return (
        log_ball(2 * r * N, prec) * k
        + log_ball(10, prec) * (M / e)
        + log_ball(4 * r**4 * M, prec) * ((2 - e) * (3 - e) * D / e)
    )


def check_angle_evaluations(ctx: OperatorContext, family: DerivedFamily, n: int, eps0, N: int | None = None, strict: bool = True) -> CheckReport:
    """Denominator of angle[k][i](1/n) divides r^k n^(D + k M), and its size bound (N <= n < 2N)."""
    N = n if N is None else N
    if not (N <= n < 2 * N):
        raise ValueError(f"need N <= n < 2N, got n={n}, N={N}")
    D = family.base_degree
    rep = CheckReport(f"angle-eval-bounds n={n} k<={family.k_max}")
    alpha = Fraction(1, n)
    for k in range(family.k_max + 1):
        modulus = ctx.r**k * n ** (D + k * ctx.M_cap)
        for i in range(3):
            val = Fraction(family.angle[k][i](alpha))
            rep.add(f"denominator k={k} i={i}", modulus % val.denominator == 0, denominator=val.denominator)
            if val != 0:
                ok = decide_le(
                    lambda p: log_ball(abs(val), p),
                    lambda p: angle_eval_bound_log(ctx.r, ctx.M_cap, D, eps0, N, k, p),
                )
            else:
                ok = True
            rep.add(f"size k={k} i={i}", ok, k=k, i=i)
    if strict:
        rep.raise_if_failed()
    return rep
