import math
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from oracles import X, brocard_style_scan, exhaustive_preimage
from padebrocard.errors import DegreeMismatch, NotASolutionTriple
from padebrocard.kernel import Poly
from padebrocard.scanner import (
    Equation,
    depress,
    find_synthetic_triples,
    integer_preimage,
    scan,
    simul_approx_witness,
)

BROCARD = Equation(Poly([-1, 0, 1]))
SYNTHETIC = [
    (3, -6489, 8, 357, 93, 81),
    (8, -1, 5, 31, 7, 3),
    (19, 455, 8, 875, 115, 1),
    (21, -8905, 8, 925, 155, 97),
    (21, -1521, 8, 921, 129, 45),
    (24, -145, 5, 55, 17, 13),
]


def test_preimage_examples():
    assert integer_preimage(BROCARD, 24) == [5]
    assert integer_preimage(BROCARD, 120) == [11]
    assert integer_preimage(BROCARD, 6) == []


def test_brocard_scan():
    sols = scan(BROCARD, 1, 1000)
    assert [(s.n, s.x) for s in sols] == [(4, 5), (5, 11), (7, 71)]


def test_perfect_power_scans_are_empty():
    assert scan(Equation(Poly([0, 0, 1])), 2, 500) == []
    assert scan(Equation(Poly([-1, 0, 0, 1])), 2, 300) == []


def test_naive_scan_agrees_on_small_window():
    coeffs = [-1, 0, 1]
    assert [(s.n, s.x) for s in scan(BROCARD, 1, 12)] == brocard_style_scan(coeffs, 1, 1, 12, 30000)


def test_chunking_and_prefilter_invariance():
    eq = Equation(Poly([1, 0, 1]), 2)
    whole = scan(eq, 1, 300)
    assert scan(eq, 1, 150) + scan(eq, 151, 300) == whole
    assert scan(eq, 1, 300, chunk=7) == whole
    assert scan(BROCARD, 1, 400, prefilter=True) == scan(BROCARD, 1, 400)


def test_parallel_scan_matches_serial():
    assert scan(BROCARD, 1, 600, workers=2, chunk=100) == scan(BROCARD, 1, 600)


coeff_lists = st.lists(st.integers(-30, 30), min_size=3, max_size=5).filter(lambda c: c[-1] != 0)


@given(coeff_lists, st.integers(0, 60))
def test_preimage_agrees_with_exhaustive_search(coeffs, x0):
    eq = Equation(Poly(coeffs))
    value = eq.P(x0)
    bound = max(eq.monotone_from, x0) + 50
    assert integer_preimage(eq, value) == exhaustive_preimage(coeffs, value, bound)


@given(coeff_lists, st.integers(-5, 5).filter(bool))
def test_depress_identity_with_sympy(coeffs, s):
    eq = Equation(Poly(coeffs), s)
    R, t, (lead, shift) = depress(eq)
    r = len(coeffs) - 1
    P = sum(c * X**i for i, c in enumerate(coeffs))
    Rs = sum(sympy.Rational(str(c)) * X**i for i, c in enumerate(R.P.coeffs))
    assert t == (r * coeffs[-1]) ** (2 * r)
    assert sympy.expand(Rs.subs(X, lead * X + shift) - t * P) == 0
    assert R.P[r - 1] == 0 and R.P.is_integral() and R.s == s * t


def test_depress_examples():
    R, t, _ = depress(Equation(Poly([0, 2, 1])))
    assert t == 16 and R.P == Poly([-16, 0, 4])
    R, t, (lead, shift) = depress(Equation(Poly([1, 0, 1])))
    assert shift == 0 and R.P.compose(Poly([0, 2])) == Poly([1, 0, 1]) * t


def test_depress_injects_solutions():
    eq = Equation(Poly([-1, 0, 1]))
    R, t, (lead, shift) = depress(eq)
    for sol in scan(eq, 1, 30):
        y = lead * sol.x + shift
        assert R.P(y) == R.s * math.factorial(sol.n)


def test_synthetic_triples_are_found():
    found = find_synthetic_triples(range(-10**4, 10**4 + 1), 12, (2, 4), s=8)
    assert (-1, 5, 31, 7, 3) in found
    assert find_synthetic_triples(range(-2000, 2001), 12, (2, 4), s=1) == []


@pytest.mark.parametrize("s,c,n,x,x1,x2", SYNTHETIC)
def test_witness_bound_on_synthetic_triples(s, c, n, x, x1, x2):
    eq = Equation(Poly([c, 0, 1]), s)
    w = simul_approx_witness(eq, n, 2, 4, x, x1, x2, prec=256)
    assert w.p == (n * x1, n**2 * x2)
    # x^2 + c = s n! and x_i^2 + c = s (n - beta_i)! give rho <= max_i n^(beta_i/2) |c| / (x x_i)
    cap = max(Fraction(n * abs(c), x * x1), Fraction(n**2 * abs(c), x * x2))
    assert w.rho.upper() <= cap


def test_witness_rejections():
    eq = Equation(Poly([-1, 0, 1]), 8)
    with pytest.raises(NotASolutionTriple):
        simul_approx_witness(eq, 5, 2, 4, 31, 8, 3)
    with pytest.raises(DegreeMismatch):
        simul_approx_witness(Equation(Poly([-1, 0, 0, 1]), 8), 9, 2, 4, 31, 7, 3)


def test_equation_validation():
    with pytest.raises(ValueError):
        Equation(Poly([1, 1]))
    with pytest.raises(ValueError):
        Equation(Poly([Fraction(1, 2), 0, 1]))
    with pytest.raises(ValueError):
        Equation(Poly([1, 0, 1]), 0)


def test_huge_preimage_is_exact():
    rng = random.Random(2)
    x = rng.randrange(10**200, 10**201)
    eq = Equation(Poly([7, -3, 0, 2]))
    assert integer_preimage(eq, eq.P(x)) == [x]
    assert integer_preimage(eq, eq.P(x) + 1) == []
