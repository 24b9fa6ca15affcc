"""The algebraic functions prod_{j<beta} (1 - j x)^(-1/r): expansion and evaluation."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .ball import DEFAULT_PREC, Ball, log_ball, root_ball
from .errors import OutOfDomain
from .kernel import Series, exact, prime_factors
from .report import CheckReport


@dataclass(frozen=True)
class OmegaSpec:
    r: int
    beta: int

    def __post_init__(self):
        if self.r < 2:
            raise ValueError(f"root degree r must be >= 2, got {self.r}")
        if self.beta < 2:
            raise ValueError(f"beta must be >= 2, got {self.beta}")


def binom_coeff(r: int, k: int) -> Fraction:
    """Generalized binomial coefficient C(-1/r, k)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return _binom_table(r, k)[k]


_BINOMS: dict[int, list[Fraction]] = {}
_BINOM_LOCK = threading.Lock()


def _binom_table(r: int, k_max: int) -> list[Fraction]:
    with _BINOM_LOCK:
        out = _BINOMS.setdefault(r, [Fraction(1)])
        a = Fraction(-1, r)
        while len(out) <= k_max:
            k = len(out) - 1
            out.append(out[-1] * (a - k) / (k + 1))
        return out


def binom_denominator_bound(r: int, k: int) -> int:
    """r**k * prod_{p | r} p**floor(k/(p-1))."""
    out = r**k
    for p in prime_factors(r):
        out *= p ** (k // (p - 1))
    return out


@lru_cache(maxsize=256)
def _omega_prefix(r: int, beta: int, order: int) -> Series:
    if beta == 2:
        acc = Series([1], order)
    else:
        acc = _omega_prefix(r, beta - 1, order)
    j = beta - 1
    binoms = _binom_table(r, order)
    # (1 - j x)^(-1/r) = sum_k (-1)^k C(-1/r, k) j^k x^k
    factor = Series([(-1) ** k * binoms[k] * j**k for k in range(order + 1)], order)
    return acc * factor


def omega_series(spec: OmegaSpec, order: int) -> Series:
    """Exact Taylor coefficients b_0..b_order of the omega function."""
    if order < 0:
        raise ValueError("order must be >= 0")
    return _omega_prefix(spec.r, spec.beta, order)


def omega_coeff_checks(spec: OmegaSpec, order: int, strict: bool = True) -> CheckReport:
    """Denominator of b_l divides r^(2l) and |b_l| <= 2^beta (2 beta)^l, for l <= order."""
    rep = CheckReport(f"omega-coeff r={spec.r} beta={spec.beta} L={order}")
    b = omega_series(spec, order)
    r, beta = spec.r, spec.beta
    for ell in range(order + 1):
        c = Fraction(b[ell])
        den_ok = r ** (2 * ell) % c.denominator == 0
        size_ok = abs(c) <= 2**beta * (2 * beta) ** ell
        rep.add(f"l={ell}", den_ok and size_ok, b=c, denominator_ok=den_ok, size_ok=size_ok)
    if strict:
        rep.raise_if_failed()
    return rep


def binom_denominator_checks(r: int, k_max: int, strict: bool = True) -> CheckReport:
    rep = CheckReport(f"binom-denominator r={r} kmax={k_max}")
    for k in range(k_max + 1):
        c = binom_coeff(r, k)
        bound = binom_denominator_bound(r, k)
        rep.add(f"k={k}", bound % c.denominator == 0, denominator=c.denominator, bound=bound)
    if strict:
        rep.raise_if_failed()
    return rep


def omega_product(spec: OmegaSpec, alpha) -> Fraction:
    """The exact rational prod_{j<beta} (1 - j alpha); raises if a factor is <= 0."""
    alpha = Fraction(exact(alpha))
    out = Fraction(1)
    for j in range(1, spec.beta):
        f = 1 - j * alpha
        if f <= 0:
            raise OutOfDomain(f"factor 1 - {j}*alpha = {f} is not positive")
        out *= f
    return out


def omega_eval_ball(spec: OmegaSpec, alpha, precision: int = DEFAULT_PREC) -> Ball:
    """Enclosure of omega(alpha), by one certified r-th root of the exact product."""
    prod = omega_product(spec, alpha)
    return root_ball(1 / prod, spec.r, precision)


def omega_log_ball(spec: OmegaSpec, alpha, precision: int = DEFAULT_PREC) -> Ball:
    prod = omega_product(spec, alpha)
    return -log_ball(prod, precision) / spec.r


def omega_tail_bound(spec: OmegaSpec, order: int, alpha) -> Fraction:
    """Bound on sum_{l > order} |b_l| |alpha|^l from |b_l| <= 2^beta (2 beta)^l.

    Requires 2 beta |alpha| < 1.
    """
    q = 2 * spec.beta * abs(Fraction(exact(alpha)))
    if q >= 1:
        raise OutOfDomain("geometric tail bound needs 2*beta*|alpha| < 1")
    return Fraction(2**spec.beta) * q ** (order + 1) / (1 - q)
