from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from oracles import X, from_sympy, to_sympy
from padebrocard.kernel import Poly, Series, exact, is_prime, padic_valuation, prime_factors

small_rats = st.fractions(min_value=-50, max_value=50, max_denominator=12)
polys = st.lists(small_rats, max_size=7).map(Poly)


def test_exact_collapses_integral_fractions():
    assert exact(Fraction(6, 3)) == 2 and type(exact(Fraction(6, 3))) is int
    assert exact(Fraction(1, 3)) == Fraction(1, 3)


def test_poly_basics():
    p = Poly([1, 0, 3, 0, 0])
    assert p.degree == 2
    assert Poly([]).degree == -1 and Poly([]).is_zero()
    assert p(2) == 13
    assert p.derivative() == Poly([0, 6])
    assert Poly.from_roots([1, 2]) == Poly([2, -3, 1])


def test_ord_at_counts_root_multiplicity():
    p = Poly.from_roots([Fraction(1, 3)] * 3 + [2])
    assert p.ord_at(Fraction(1, 3)) == 3
    assert p.ord_at(2) == 1
    assert p.ord_at(5) == 0


def test_divide_linear_remainder_is_value():
    p = Poly([5, -1, 0, 2])
    q, rem = p.divide_linear(Fraction(3, 2))
    assert rem == p(Fraction(3, 2))
    assert q * Poly([Fraction(-3, 2), 1]) + Poly([rem]) == p


def test_primes_and_valuations():
    assert [n for n in range(30) if is_prime(n)] == list(sympy.primerange(0, 30))
    assert prime_factors(360) == [2, 3, 5]
    assert padic_valuation(Fraction(48, 5), 2) == 4
    assert padic_valuation(Fraction(48, 25), 5) == -2


@given(polys, polys)
def test_mul_matches_sympy(a, b):
    product = sympy.expand(to_sympy(a) * to_sympy(b))
    assert a * b == (Poly(from_sympy(product)) if product != 0 else Poly([]))


@given(polys, polys, small_rats)
def test_ring_laws_and_evaluation(a, b, t):
    assert (a + b)(t) == a(t) + b(t)
    assert (a * b)(t) == a(t) * b(t)
    assert (a - a).is_zero()
    assert a.compose(b)(t) == a(b(t))


@given(polys, polys)
def test_divmod_identity(a, b):
    if b.is_zero():
        return
    q, r = a.divmod(b)
    assert q * b + r == a
    assert r.degree < b.degree


@given(polys)
def test_derivative_matches_sympy(a):
    got = a.derivative()
    want = sympy.diff(to_sympy(a), X)
    assert got == (Poly(from_sympy(want)) if want != 0 else Poly([]))


def test_series_product_and_truncation():
    geo = Series([1] * 10, 9)
    one_minus_x = Series([1, -1], 9)
    assert (geo * one_minus_x) == Series([1], 9)
    assert geo.truncate(3).order == 3
    assert Series([0, 0, 4], 5).valuation() == 2


@given(st.lists(small_rats, min_size=1, max_size=8), polys)
def test_series_mul_poly_matches_full_product(coeffs, p):
    order = len(coeffs) - 1
    s = Series(coeffs, order)
    full = Poly(coeffs) * p
    got = s.mul_poly(p)
    assert all(got[k] == full[k] for k in range(order + 1))


def test_poly_is_immutable():
    p = Poly([1, 2])
    with pytest.raises(AttributeError):
        p.coeffs = (3,)


def test_evaluation_derivative_and_order_examples():
    assert Poly([])(7) == 0
    assert Poly([-1, 0, 1])(Fraction(1, 2)) == Fraction(-3, 4)
    assert Poly([2, -6, 4])(Fraction(1, 3)) == Fraction(4, 9)
    assert Poly([0, 0, 0, 1]).derivative() == Poly([0, 0, 3])
    assert Poly([2, -6, 4]).derivative() == Poly([-6, 8])
    cubic_bump = Poly([0, 0, 1, -1])
    assert cubic_bump.ord_at(0) == 2 and cubic_bump.ord_at(1) == 1
    assert (Poly([-1, 2]) ** 3 * Poly([2, 1])).ord_at(Fraction(1, 2)) == 3


def test_valuation_examples():
    assert padic_valuation(12, 2) == 2
    assert padic_valuation(Fraction(3, 8), 2) == -3
    assert padic_valuation(Fraction(3, 8), 5) == 0


def test_series_examples():
    assert Series([1, 1], 2) * Series([1, -1], 2) == Series([1, 0, -1], 2)
    s = Series([3, Fraction(1, 7), 2], 2)
    assert Series([1], 2) * s == s
    half = Series([1, Fraction(1, 2), Fraction(3, 8)], 2)
    assert half * half == Series([1, 1, 1], 2)


def test_values_survive_pickling():
    import pickle

    p, s = Poly([Fraction(1, 3), 0, 2]), Series([1, Fraction(1, 2)], 4)
    assert pickle.loads(pickle.dumps(p)) == p
    assert pickle.loads(pickle.dumps(s)) == s
