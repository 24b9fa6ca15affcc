"""Exact scalars, dense univariate polynomials and truncated power series.

Scalars are Python ``int`` and ``fractions.Fraction``; a coefficient that is
integral is always stored as ``int`` so integer polynomials stay on the fast
path. Every object here is immutable.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

from .errors import NotPrime, ZeroInput, ZeroPolynomial

Scalar = int | Fraction


def exact(value) -> Scalar:
    """Coerce to an exact scalar, collapsing integral fractions to ``int``."""
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, Rational):
        return exact(Fraction(value.numerator, value.denominator))
    if isinstance(value, str):
        return exact(Fraction(value))
    raise TypeError(f"not an exact rational: {value!r}")


def denominator(value: Scalar) -> int:
    return 1 if isinstance(value, int) else value.denominator


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # deterministic for n < 3.3e24; beyond that a strong probable-prime test
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime divisors of |n| by trial division."""
    n = abs(n)
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out.append(n)
    return out


def padic_valuation(q, p: int) -> int:
    """Exponent of the prime ``p`` in the nonzero rational ``q``."""
    q = Fraction(q)
    if q == 0:
        raise ZeroInput("p-adic valuation of zero is undefined")
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    v = 0
    num, den = abs(q.numerator), q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def _trim(coeffs: list) -> tuple:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


class Poly:
    """Dense polynomial with exact rational coefficients, constant term first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        object.__setattr__(self, "coeffs", _trim([exact(c) for c in coeffs]))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    def __reduce__(self):
        return (Poly, (self.coeffs,))

    @classmethod
    def _raw(cls, coeffs: list) -> "Poly":
        # coefficients already exact; only trim and collapse
        p = object.__new__(cls)
        object.__setattr__(
            p,
            "coeffs",
            _trim([c.numerator if type(c) is Fraction and c.denominator == 1 else c for c in coeffs]),
        )
        return p

    @classmethod
    def monomial(cls, k: int, c=1) -> "Poly":
        return cls([0] * k + [c])

    @classmethod
    def x(cls) -> "Poly":
        return cls([0, 1])

    @classmethod
    def from_roots(cls, roots: Iterable, lead=1) -> "Poly":
        out = cls([lead])
        for a in roots:
            out = out * cls([-exact(a), 1])
        return out

    # -- basic structure -------------------------------------------------
    @property
    def degree(self) -> int:
        """Degree; the zero polynomial reports -1."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, k: int) -> Scalar:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __iter__(self):
        return iter(self.coeffs)

    def is_integral(self) -> bool:
        return all(type(c) is int for c in self.coeffs)

    def common_denominator(self) -> int:
        d = 1
        for c in self.coeffs:
            if type(c) is Fraction:
                d = d * c.denominator // math.gcd(d, c.denominator)
        return d

    def max_abs_coeff(self) -> Scalar:
        return max((abs(c) for c in self.coeffs), default=0)

    def leading(self) -> Scalar:
        return self.coeffs[-1] if self.coeffs else 0

    # -- arithmetic --------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly([other]).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly([other])
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw([-c for c in self.coeffs])

    def __sub__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly([other])
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            c = exact(other)
            if c == 0:
                return Poly()
            return Poly._raw([a * c for a in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly()
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        return Poly._raw(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power")
        out, base = Poly([1]), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale(self, c) -> "Poly":
        return self * c

    def __truediv__(self, c) -> "Poly":
        c = Fraction(exact(c))
        return Poly._raw([a / c for a in self.coeffs])

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        """Long division over the rationals."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = Fraction(other.leading())
        if len(rem) <= dq:
            return Poly(), self
        quot = [0] * (len(rem) - dq)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = exact(rem[k] / lead) if rem[k] else 0
            if c:
                quot[k - dq] = c
                for j, b in enumerate(other.coeffs):
                    rem[k - dq + j] -= c * b
        return Poly._raw(quot), Poly._raw(rem[:dq])

    def divide_linear(self, alpha) -> tuple["Poly", Scalar]:
        """Synthetic division by (x - alpha): returns (quotient, remainder)."""
        alpha = exact(alpha)
        n = len(self.coeffs)
        if n == 0:
            return Poly(), 0
        acc = 0
        quot = [0] * (n - 1)
        for k in range(n - 1, -1, -1):
            acc = acc * alpha + self.coeffs[k]
            if k:
                quot[k - 1] = acc
        return Poly._raw(quot), exact(acc)

    # -- calculus and evaluation -----------------------------------------
    def __call__(self, alpha) -> Scalar:
        acc = 0
        alpha = exact(alpha)
        for c in reversed(self.coeffs):
            acc = acc * alpha + c
        return exact(acc)

    def evaluate(self, alpha) -> Scalar:
        return self(alpha)

    def derivative(self) -> "Poly":
        return Poly._raw([k * c for k, c in enumerate(self.coeffs)][1:])

    def compose(self, inner: "Poly") -> "Poly":
        out = Poly()
        for c in reversed(self.coeffs):
            out = out * inner + c
        return out

    def ord_at(self, alpha) -> int:
        """Multiplicity of ``alpha`` as a root, by repeated synthetic division."""
        if self.is_zero():
            raise ZeroPolynomial("order of vanishing of the zero polynomial")
        m, p = 0, self
        while True:
            q, rem = p.divide_linear(alpha)
            if rem != 0:
                return m
            m, p = m + 1, q

    def __repr__(self) -> str:
        if not self.coeffs:
            return "Poly(0)"
        return f"Poly({list(map(str, self.coeffs))})"

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]


def poly_eval(p: Poly, alpha) -> Scalar:
    return p(alpha)


def poly_derivative(p: Poly) -> Poly:
    return p.derivative()


def poly_ord_at(p: Poly, alpha) -> int:
    return p.ord_at(alpha)


class Series:
    """Power series known exactly through ``x**order`` (``order + 1`` coefficients)."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Sequence, order: int | None = None):
        cs = [exact(c) for c in coeffs]
        if order is None:
            order = len(cs) - 1
        if order < 0:
            raise ValueError("truncation order must be >= 0")
        cs = cs[: order + 1] + [0] * (order + 1 - len(cs))
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "order", order)

    def __setattr__(self, name, value):
        raise AttributeError("Series is immutable")

    def __reduce__(self):
        return (Series, (self.coeffs, self.order))

    @classmethod
    def _raw(cls, coeffs: list, order: int) -> "Series":
        s = object.__new__(cls)
        object.__setattr__(
            s,
            "coeffs",
            tuple(c.numerator if type(c) is Fraction and c.denominator == 1 else c for c in coeffs),
        )
        object.__setattr__(s, "order", order)
        return s

    @classmethod
    def from_poly(cls, p: Poly, order: int) -> "Series":
        return cls(p.coeffs, order)

    def __getitem__(self, k: int) -> Scalar:
        if k > self.order:
            raise IndexError(f"coefficient {k} beyond truncation order {self.order}")
        return self.coeffs[k]

    def __len__(self) -> int:
        return self.order + 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.order))

    def truncate(self, order: int) -> "Series":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return Series._raw(list(self.coeffs[: order + 1]), order)

    def __add__(self, other: "Series") -> "Series":
        n = min(self.order, other.order)
        return Series._raw([self.coeffs[i] + other.coeffs[i] for i in range(n + 1)], n)

    def __neg__(self) -> "Series":
        return Series._raw([-c for c in self.coeffs], self.order)

    def __sub__(self, other: "Series") -> "Series":
        return self + (-other)

    def __mul__(self, other) -> "Series":
        if isinstance(other, Poly):
            return self.mul_poly(other)
        if not isinstance(other, Series):
            c = exact(other)
            return Series._raw([a * c for a in self.coeffs], self.order)
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = [0] * (n + 1)
        for i in range(n + 1):
            x = a[i]
            if x == 0:
                continue
            for j in range(n + 1 - i):
                out[i + j] += x * b[j]
        return Series._raw(out, n)

    __rmul__ = __mul__

    def mul_poly(self, p: Poly) -> "Series":
        """Product with an exactly-known polynomial; the order is unchanged."""
        n = self.order
        out = [0] * (n + 1)
        for i, x in enumerate(p.coeffs[: n + 1]):
            if x == 0:
                continue
            for j in range(n + 1 - i):
                out[i + j] += x * self.coeffs[j]
        return Series._raw(out, n)

    def shift(self, m: int) -> "Series":
        """Multiply by x**m; the known range grows by m."""
        return Series._raw([0] * m + list(self.coeffs), self.order + m)

    def derivative(self) -> "Series":
        if self.order == 0:
            raise ValueError("derivative of an order-0 series carries no information")
        return Series._raw([k * self.coeffs[k] for k in range(1, self.order + 1)], self.order - 1)

    def valuation(self) -> int | None:
        """Index of the first nonzero coefficient, or None if all known ones vanish."""
        for i, c in enumerate(self.coeffs):
            if c != 0:
                return i
        return None

    def partial_sum(self, alpha) -> Scalar:
        alpha = exact(alpha)
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * alpha + c
        return exact(acc)

    def __repr__(self) -> str:
        return f"Series({list(map(str, self.coeffs))}, order={self.order})"


def series_mul(a: Series, b: Series) -> Series:
    return a * b
