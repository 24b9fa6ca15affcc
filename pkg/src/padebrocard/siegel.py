"""Small nonzero integer solutions of homogeneous integer linear systems.

The existence guarantee is the pigeonhole bound |X_i| <= (3AN)^(M/(N-M)).
Construction goes through an exact integer kernel basis followed by lattice
reduction (both from FLINT), with the bound checked after the fact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence

import flint

from .ball import Ball, iroot, log_ball
from .errors import BoundNotMet, BudgetExceeded

DEFAULT_ORACLE_BUDGET = 2_000_000


@dataclass(frozen=True)
class HomogeneousSystem:
    """M equations in N > M unknowns with integer coefficients."""

    entries: tuple[tuple[int, ...], ...]

    def __init__(self, entries: Sequence[Sequence[int]]):
        rows = []
        for row in entries:
            out = []
            for a in row:
                if int(a) != a:
                    raise TypeError(f"non-integer coefficient {a!r}")
                out.append(int(a))
            rows.append(tuple(out))
        if not rows:
            raise ValueError("system needs at least one equation")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged coefficient matrix")
        if width <= len(rows):
            raise ValueError(f"need more unknowns than equations (M={len(rows)}, N={width})")
        object.__setattr__(self, "entries", tuple(rows))

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @property
    def coeff_bound(self) -> int:
        return max(1, max(abs(a) for row in self.entries for a in row))

    def apply(self, x: Sequence[int]) -> list[int]:
        return [sum(a * b for a, b in zip(row, x)) for row in self.entries]

    def is_solution(self, x: Sequence[int]) -> bool:
        return len(x) == self.cols and all(v == 0 for v in self.apply(x))


@dataclass(frozen=True)
class SiegelBound:
    """The bound base**(num/den) with base = 3AN and num/den = M/(N-M)."""

    base: int
    num: int
    den: int

    def admits(self, x: int) -> bool:
        """Exact test of |x| <= base**(num/den)."""
        return abs(x) ** self.den <= self.base**self.num

    def floor(self) -> int:
        """Largest integer admitted by the bound."""
        return iroot(self.base**self.num, self.den)

    @property
    def exponent(self) -> Fraction:
        return Fraction(self.num, self.den)

    def ball(self, prec: int = 64) -> Ball:
        return (log_ball(self.base, prec) * self.exponent).exp()

    def __float__(self) -> float:
        # outward: the float is rounded up past the true value
        b = self.ball(64)
        v = float(b.upper())
        return math.nextafter(v, math.inf)

    def to_json(self) -> dict:
        return {"expr": f"({self.base})^({self.num}/{self.den})", "value": float(self), "floor": self.floor()}


def siegel_bound(sys: HomogeneousSystem) -> SiegelBound:
    m, n = sys.rows, sys.cols
    return SiegelBound(3 * sys.coeff_bound * n, m, n - m)


def _primitive(v: Sequence[int]) -> tuple[int, ...]:
    g = reduce(math.gcd, v, 0)
    if g == 0:
        return tuple(v)
    v = [x // g for x in v]
    first = next(x for x in v if x)
    if first < 0:
        v = [-x for x in v]
    return tuple(v)


def _sort_key(v: Sequence[int]) -> tuple:
    return (max(abs(x) for x in v), v)


def kernel_basis(sys: HomogeneousSystem) -> list[tuple[int, ...]]:
    """Integer basis vectors of the rational kernel, each made primitive."""
    rows = []
    for row in sys.entries:
        g = reduce(math.gcd, row, 0)
        if g:
            rows.append([a // g for a in row])
    if not rows:
        return [tuple(int(i == j) for j in range(sys.cols)) for i in range(sys.cols)]
    mat = flint.fmpz_mat(rows)
    x, nullity = mat.nullspace()
    basis = []
    for c in range(nullity):
        basis.append(_primitive([int(x[i, c]) for i in range(sys.cols)]))
    return saturate(basis)


def saturate(basis: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Basis of (span_Q basis) ∩ Z^N, given linearly independent integer vectors.

    Writing the basis matrix as B = H S with H square and S primitive, the
    rows of S span the saturation; H comes from the Hermite form of B^T.
    """
    d = len(basis)
    if d == 0:
        return []
    B = flint.fmpz_mat([list(v) for v in basis])
    h = B.transpose().hnf()
    H = flint.fmpz_mat([[h[i, j] for j in range(d)] for i in range(d)]).transpose()
    S = H.solve(B)
    out = []
    for i in range(d):
        row = []
        for j in range(S.ncols()):
            q = S[i, j]
            if q.q != 1:
                raise AssertionError("saturation produced a non-integral vector")
            row.append(int(q.p))
        out.append(tuple(row))
    return out


def reduce_basis(basis: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    if len(basis) <= 1:
        return list(basis)
    red = flint.fmpz_mat([list(v) for v in basis]).lll()
    return [tuple(int(red[i, j]) for j in range(red.ncols())) for i in range(red.nrows())]


def solve_small(sys: HomogeneousSystem, enum_radius: int = 2, oracle_budget: int = DEFAULT_ORACLE_BUDGET) -> tuple[int, ...]:
    """A nonzero primitive integer solution within the pigeonhole bound.

    Raises BoundNotMet only if reduction, bounded enumeration over the
    reduced basis and (when affordable) exhaustive search all fail.
    """
    bound = siegel_bound(sys)
    reduced = [_primitive(v) for v in reduce_basis(kernel_basis(sys)) if any(v)]
    for v in reduced:
        if not sys.is_solution(v):
            raise AssertionError("kernel vector failed exact verification")
    best = min(reduced, key=_sort_key)
    if bound.admits(max(abs(x) for x in best)):
        return best

    # bounded enumeration over small combinations of the reduced basis
    d = len(reduced)
    if (2 * enum_radius + 1) ** d <= oracle_budget:
        cands = []
        for coeffs in itertools.product(range(-enum_radius, enum_radius + 1), repeat=d):
            if not any(coeffs):
                continue
            v = [sum(c * b[i] for c, b in zip(coeffs, reduced)) for i in range(sys.cols)]
            if any(v):
                v = _primitive(v)
                if bound.admits(max(abs(x) for x in v)):
                    cands.append(v)
        if cands:
            return min(cands, key=_sort_key)

    w = bound.floor()
    try:
        hit = brute_force_oracle(sys, w, budget=oracle_budget)
    except BudgetExceeded:
        hit = None
    if hit is not None:
        return hit
    raise BoundNotMet(f"no solution within {bound.to_json()['expr']} found")


def brute_force_oracle(sys: HomogeneousSystem, box: int, budget: int = DEFAULT_ORACLE_BUDGET):
    """Exhaustive search of [-box, box]^N for a nonzero solution.

    Shells are scanned by increasing max-norm, each in lexicographic order,
    so the result is a solution of minimal max-norm (sign-normalized).
    Returns None when the box holds no solution.
    """
    n = sys.cols
    if box < 1:
        return None
    if (2 * box + 1) ** n > budget:
        raise BudgetExceeded(f"(2*{box}+1)^{n} points exceed the budget {budget}")
    rows = sys.entries
    for w in range(1, box + 1):
        rng = range(-w, w + 1)
        for x in itertools.product(rng, repeat=n):
            if max(x) != w and min(x) != -w:
                continue
            if all(sum(a * b for a, b in zip(row, x)) == 0 for row in rows):
                return _primitive(x)
    return None
