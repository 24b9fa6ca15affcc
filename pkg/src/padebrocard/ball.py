"""Rigorous real enclosures (center, radius) over dyadic rationals.

A :class:`Ball` stores its center as a dyadic rational rounded to ``prec``
significant bits and a nonnegative dyadic radius that absorbs every rounding
error. Elementary functions (``log``, ``exp``, ``root``) are evaluated by
fixed-point integer series carrying separate floor/ceiling sequences, so the
returned enclosures are mathematically guaranteed rather than heuristic.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import gmpy2

from .errors import FloorAmbiguous, OutOfDomain

DEFAULT_PREC = 128
_RADIUS_BITS = 30


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _dyadic(n: int, s: int) -> Fraction:
    """The rational n * 2**-s."""
    return Fraction(n, 1 << s) if s >= 0 else Fraction(n << -s)


def _round_nearest(q: Fraction, prec: int) -> Fraction:
    if q == 0:
        return Fraction(0)
    num, den = q.numerator, q.denominator
    s = prec - (abs(num).bit_length() - den.bit_length())
    if s >= 0:
        a, b = num << s, den
    else:
        a, b = num, den << -s
    n = (2 * a + b) // (2 * b)
    return _dyadic(n, s)


def _round_up(r: Fraction, bits: int = _RADIUS_BITS) -> Fraction:
    """Smallest dyadic with ``bits`` significant bits that is >= r >= 0."""
    if r <= 0:
        return Fraction(0)
    num, den = r.numerator, r.denominator
    s = bits - (num.bit_length() - den.bit_length())
    if s >= 0:
        n = _ceil_div(num << s, den)
    else:
        n = _ceil_div(num, den << -s)
    return _dyadic(n, s)


def _floor_scaled(q: Fraction, w: int) -> int:
    """floor(q * 2**w)."""
    if w >= 0:
        return (q.numerator << w) // q.denominator
    return q.numerator // (q.denominator << -w)


def _ceil_scaled(q: Fraction, w: int) -> int:
    return -_floor_scaled(-q, w)


def iroot(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0."""
    if n < 0:
        raise ValueError("iroot of a negative number")
    return int(gmpy2.iroot(gmpy2.mpz(n), k)[0])


def iroot_ceil(n: int, k: int) -> int:
    r, is_exact = gmpy2.iroot(gmpy2.mpz(n), k)
    return int(r) if is_exact else int(r) + 1


# -- fixed-point elementary kernels -------------------------------------------
# Each returns integer bounds (lo, hi) on value * 2**w.


def _atanh_sum(zn: int, zd: int, w: int) -> tuple[int, int]:
    """Bounds on sum_k z^(2k+1)/(2k+1) for z = zn/zd in [0, 1/2]."""
    one = 1 << w
    p_lo = (zn << w) // zd
    p_hi = _ceil_div(zn << w, zd)
    z2_lo = (p_lo * p_lo) >> w
    z2_hi = _ceil_div(p_hi * p_hi, one)
    s_lo = s_hi = 0
    k = 0
    while p_hi > 1:
        s_lo += p_lo // (2 * k + 1)
        s_hi += _ceil_div(p_hi, 2 * k + 1)
        p_lo = (p_lo * z2_lo) >> w
        p_hi = _ceil_div(p_hi * z2_hi, one)
        k += 1
    # tail: geometric with ratio z^2 <= 1/4
    s_hi += _ceil_div(4 * p_hi, 3 * (2 * k + 1)) + 1
    return s_lo, s_hi


@lru_cache(maxsize=64)
def _ln2(w: int) -> tuple[int, int]:
    lo, hi = _atanh_sum(1, 3, w)
    return 2 * lo, 2 * hi


def _ln_bounds(q: Fraction, w: int) -> tuple[int, int]:
    """Bounds on ln(q) * 2**w for rational q > 0."""
    if q <= 0:
        raise OutOfDomain(f"log of nonpositive value {q}")
    num, den = q.numerator, q.denominator
    e = num.bit_length() - den.bit_length()
    # q = m * 2**e with m in [1, 2)
    if e >= 0:
        mn, md = num, den << e
    else:
        mn, md = num << -e, den
    if mn < md:
        e -= 1
        mn <<= 1
    elif mn >= 2 * md:
        e += 1
        md <<= 1
    lo, hi = _atanh_sum(mn - md, mn + md, w)
    lo, hi = 2 * lo, 2 * hi
    l2lo, l2hi = _ln2(w)
    if e >= 0:
        return lo + e * l2lo, hi + e * l2hi
    return lo + e * l2hi, hi + e * l2lo


def _exp_small(a_lo: int, a_hi: int, w: int) -> tuple[int, int]:
    """Bounds on exp(a) * 2**w for 0 <= a <= 1/2 given a*2**w in [a_lo, a_hi]."""
    one = 1 << w
    p_lo = p_hi = one
    s_lo = s_hi = one
    n = 1
    while p_hi > 1:
        p_lo = (p_lo * a_lo) // (one * n)
        p_hi = _ceil_div(p_hi * a_hi, one * n)
        s_lo += p_lo
        s_hi += p_hi
        n += 1
    s_hi += 2 * p_hi + 1
    return s_lo, s_hi


def _exp_bounds(y: Fraction, w: int) -> tuple[Fraction, Fraction]:
    """Rational bounds lo <= exp(y) <= hi with about w bits of relative accuracy."""
    approx = float(y)
    if not math.isfinite(approx) or abs(approx) > 2.0**52:
        raise OverflowError("exponent argument too large")
    k = int(round(approx / math.log(2)))
    wk = w + max(k, -k).bit_length() + 8
    l2lo, l2hi = _ln2(wk)
    # t = y - k ln 2 enclosed in [t_lo, t_hi] (scaled by 2**wk)
    yl, yh = _floor_scaled(y, wk), _ceil_scaled(y, wk)
    if k >= 0:
        t_lo, t_hi = yl - k * l2hi, yh - k * l2lo
    else:
        t_lo, t_hi = yl - k * l2lo, yh - k * l2hi
    one = 1 << wk

    def exp_at(t: int, upper: bool) -> Fraction:
        a = abs(t)
        if a > one // 2:
            raise AssertionError("argument reduction failed")
        lo, hi = _exp_small(a, a, wk)
        if t >= 0:
            v = hi if upper else lo
            return Fraction(v, one)
        # exp(-a) = 1/exp(a)
        v = lo if upper else hi
        return Fraction(one, v)

    scale = Fraction(2) ** k
    return exp_at(t_lo, False) * scale, exp_at(t_hi, True) * scale


def _atan_inv(x: int, w: int) -> tuple[int, int]:
    """Bounds on atan(1/x) * 2**w for integer x >= 2."""
    x2 = x * x
    p_lo = (1 << w) // x
    p_hi = _ceil_div(1 << w, x)
    s_lo = s_hi = 0
    k = 0
    while True:
        t_lo, t_hi = p_lo // (2 * k + 1), _ceil_div(p_hi, 2 * k + 1)
        if t_hi <= 1:
            return s_lo - t_hi, s_hi + t_hi
        if k % 2 == 0:
            s_lo, s_hi = s_lo + t_lo, s_hi + t_hi
        else:
            s_lo, s_hi = s_lo - t_hi, s_hi - t_lo
        p_lo //= x2
        p_hi = _ceil_div(p_hi, x2)
        k += 1


@lru_cache(maxsize=16)
def _pi(w: int) -> tuple[int, int]:
    a_lo, a_hi = _atan_inv(5, w)
    b_lo, b_hi = _atan_inv(239, w)
    return 16 * a_lo - 4 * b_hi, 16 * a_hi - 4 * b_lo


def _root_bounds(q: Fraction, k: int, prec: int) -> tuple[Fraction, Fraction]:
    """Rational bounds on the positive k-th root of q > 0."""
    num, den = q.numerator, q.denominator
    s = prec + 2 - (num.bit_length() - den.bit_length()) // k
    lo = iroot(_floor_scaled(q, k * s), k)
    hi = iroot_ceil(_ceil_scaled(q, k * s), k)
    return _dyadic(lo, s), _dyadic(hi, s)


class Ball:
    """Closed interval [center - radius, center + radius] with a dyadic center."""

    __slots__ = ("center", "radius", "prec")

    def __init__(self, center, radius=0, prec: int = DEFAULT_PREC):
        c = Fraction(center)
        rc = _round_nearest(c, prec)
        err = abs(c - rc)
        object.__setattr__(self, "center", rc)
        object.__setattr__(self, "radius", _round_up(Fraction(radius) + err))
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, name, value):
        raise AttributeError("Ball is immutable")

    @classmethod
    def _make(cls, center: Fraction, radius: Fraction, prec: int) -> "Ball":
        return cls(center, radius, prec)

    @classmethod
    def exact(cls, q, prec: int = DEFAULT_PREC) -> "Ball":
        return cls(q, 0, prec)

    @classmethod
    def from_bounds(cls, lo, hi, prec: int = DEFAULT_PREC) -> "Ball":
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        c = _round_nearest((lo + hi) / 2, prec)
        return cls._make(c, max(c - lo, hi - c), prec)

    @classmethod
    def pi(cls, prec: int = DEFAULT_PREC) -> "Ball":
        w = prec + 16
        lo, hi = _pi(w)
        return cls.from_bounds(Fraction(lo, 1 << w), Fraction(hi, 1 << w), prec)

    @classmethod
    def coerce(cls, value, prec: int = DEFAULT_PREC) -> "Ball":
        if isinstance(value, Ball):
            return value
        return cls.exact(value, prec)

    # -- views -----------------------------------------------------------
    def lower(self) -> Fraction:
        return self.center - self.radius

    def upper(self) -> Fraction:
        return self.center + self.radius

    def mag(self) -> Fraction:
        """Upper bound on |x|."""
        return abs(self.center) + self.radius

    def mig(self) -> Fraction:
        """Lower bound on |x|."""
        return max(Fraction(0), abs(self.center) - self.radius)

    def contains(self, q) -> bool:
        if isinstance(q, Ball):
            return self.lower() <= q.lower() and q.upper() <= self.upper()
        return self.lower() <= Fraction(q) <= self.upper()

    def overlaps(self, other: "Ball") -> bool:
        return self.lower() <= other.upper() and other.lower() <= self.upper()

    def contains_zero(self) -> bool:
        return self.lower() <= 0 <= self.upper()

    def is_positive(self) -> bool:
        return self.lower() > 0

    def is_negative(self) -> bool:
        return self.upper() < 0

    def certainly_lt(self, other) -> bool:
        return self.upper() < Ball.coerce(other, self.prec).lower()

    def certainly_le(self, other) -> bool:
        return self.upper() <= Ball.coerce(other, self.prec).lower()

    def certainly_gt(self, other) -> bool:
        return self.lower() > Ball.coerce(other, self.prec).upper()

    def floor(self) -> int:
        lo, hi = math.floor(self.lower()), math.floor(self.upper())
        if lo != hi:
            raise FloorAmbiguous(f"ball {self!r} straddles the integer {hi}")
        return lo

    def with_prec(self, prec: int) -> "Ball":
        return Ball(self.center, self.radius, prec)

    def __float__(self) -> float:
        return float(self.center)

    def __repr__(self) -> str:
        return f"Ball({_fmt(self.center)} +/- {float(self.radius):.3g})"

    def to_json(self) -> dict:
        return {"center": _fmt(self.center), "radius": f"{float(self.radius):.6e}"}

    # -- arithmetic --------------------------------------------------------
    def _other(self, other) -> "Ball":
        return other if isinstance(other, Ball) else Ball.exact(other, self.prec)

    def __add__(self, other) -> "Ball":
        other = self._other(other)
        prec = max(self.prec, other.prec)
        return Ball._make(self.center + other.center, self.radius + other.radius, prec)

    __radd__ = __add__

    def __neg__(self) -> "Ball":
        return Ball._make(-self.center, self.radius, self.prec)

    def __sub__(self, other) -> "Ball":
        return self + (-self._other(other))

    def __rsub__(self, other) -> "Ball":
        return self._other(other) - self

    def __mul__(self, other) -> "Ball":
        other = self._other(other)
        prec = max(self.prec, other.prec)
        rad = (
            abs(self.center) * other.radius
            + abs(other.center) * self.radius
            + self.radius * other.radius
        )
        return Ball._make(self.center * other.center, rad, prec)

    __rmul__ = __mul__

    def inverse(self) -> "Ball":
        if self.contains_zero():
            raise ZeroDivisionError(f"inverse of a ball containing zero: {self!r}")
        lo, hi = self.lower(), self.upper()
        return Ball.from_bounds(1 / hi, 1 / lo, self.prec)

    def __truediv__(self, other) -> "Ball":
        return self * self._other(other).inverse()

    def __rtruediv__(self, other) -> "Ball":
        return self._other(other) * self.inverse()

    def __pow__(self, k: int) -> "Ball":
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers")
        out, base = Ball.exact(1, self.prec), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __abs__(self) -> "Ball":
        return Ball.from_bounds(self.mig(), self.mag(), self.prec)

    # -- elementary functions -----------------------------------------------
    def root(self, k: int) -> "Ball":
        """Positive real k-th root of a positive ball."""
        if k < 1:
            raise ValueError("root index must be >= 1")
        if self.lower() <= 0:
            raise OutOfDomain(f"root of a ball that is not positive: {self!r}")
        lo, _ = _root_bounds(self.lower(), k, self.prec + 8)
        _, hi = _root_bounds(self.upper(), k, self.prec + 8)
        return Ball.from_bounds(lo, hi, self.prec)

    def sqrt(self) -> "Ball":
        return self.root(2)

    def log(self) -> "Ball":
        if self.lower() <= 0:
            raise OutOfDomain(f"log of a ball that is not positive: {self!r}")
        w = self.prec + 24
        lo, _ = _ln_bounds(self.lower(), w)
        _, hi = _ln_bounds(self.upper(), w)
        return Ball.from_bounds(Fraction(lo, 1 << w), Fraction(hi, 1 << w), self.prec)

    def exp(self) -> "Ball":
        w = self.prec + 24
        lo, _ = _exp_bounds(self.lower(), w)
        _, hi = _exp_bounds(self.upper(), w)
        return Ball.from_bounds(lo, hi, self.prec)


def _fmt(q: Fraction, digits: int = 30) -> str:
    if q == 0:
        return "0"
    from decimal import Context, Decimal

    ctx = Context(prec=digits)
    return format(ctx.divide(Decimal(q.numerator), Decimal(q.denominator)), "g")


def log_ball(q, prec: int = DEFAULT_PREC) -> Ball:
    """Enclosure of ln(q) for an exact positive rational (or integer) q."""
    q = Fraction(q)
    w = prec + 24
    lo, hi = _ln_bounds(q, w)
    return Ball.from_bounds(Fraction(lo, 1 << w), Fraction(hi, 1 << w), prec)


def root_ball(q, k: int, prec: int = DEFAULT_PREC) -> Ball:
    """Enclosure of the positive k-th root of an exact positive rational."""
    q = Fraction(q)
    if q <= 0:
        raise OutOfDomain(f"root of nonpositive value {q}")
    lo, hi = _root_bounds(q, k, prec + 8)
    return Ball.from_bounds(lo, hi, prec)


def ball_eval_series(series, alpha, tail_bound, prec: int = DEFAULT_PREC) -> Ball:
    """Enclose the full series value at ``alpha`` given a bound on the neglected tail."""
    partial = series.partial_sum(alpha)
    return Ball(partial, Fraction(tail_bound), prec)


def decide_le(make_lhs, make_rhs, prec: int = 64, max_prec: int = 1 << 14) -> bool:
    """Certified decision of lhs <= rhs, raising precision until the balls separate.

    ``make_lhs``/``make_rhs`` take a precision and return a :class:`Ball`.
    """
    while prec <= max_prec:
        a, b = make_lhs(prec), make_rhs(prec)
        if a.upper() <= b.lower():
            return True
        if a.lower() > b.upper():
            return False
        prec *= 2
    raise FloorAmbiguous("comparison undecided at the precision cap")
