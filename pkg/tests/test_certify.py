import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from oracles import to_sympy, X
from padebrocard.certify import (
    check_transformation,
    delta_poly,
    delta_rank_report,
    det3,
    low_order_point,
    ord_by_derivatives,
    rank,
    rank3_certificate,
)
from padebrocard.errors import PreconditionFailed, RankDeficient
from padebrocard.forge import DerivedFamily, build_family
from padebrocard.kernel import Poly

small_ints = st.integers(-30, 30)


@given(st.lists(st.lists(small_ints, min_size=3, max_size=3), min_size=3, max_size=3))
def test_det3_matches_sympy(m):
    assert det3(m) == sympy.Matrix(m).det()


@given(st.lists(st.lists(small_ints, min_size=3, max_size=3), min_size=1, max_size=5))
def test_rank_matches_sympy(rows):
    assert rank(rows) == sympy.Matrix(rows).rank()


def test_low_order_point_examples():
    assert low_order_point(Poly([0, 1]) * Poly([-1, 1]) ** 2, [0, 1]) == (0, 1)
    assert low_order_point(Poly.from_roots([1, 2, 3]), [1, 2, 3, 4]) == (4, 0)
    rng = random.Random(5)
    Q = Poly([rng.randint(-9, 9) for _ in range(72)] + [1])
    points = rng.sample(range(-10**6, 10**6), 100)
    point, order = low_order_point(Q, [Fraction(p, 7) for p in points])
    assert order == 0


def test_ord_by_derivatives_agrees_with_division():
    Q = Poly.from_roots([Fraction(1, 97)] * 4 + [3, 3])
    assert ord_by_derivatives(Q, Fraction(1, 97)) == Q.ord_at(Fraction(1, 97)) == 4
    assert ord_by_derivatives(Q, 3) == 2


def test_proportional_rows_give_zero_delta():
    from padebrocard.forge import make_context

    ctx = make_context(2, 4, 2, 4)
    P = Poly([1, 2, 3])
    fam = build_family(ctx, (P, P, P), 2)
    fam = DerivedFamily([tuple(row[0] for _ in range(3)) for row in fam.square], fam.angle, fam.q_table, 2, 4)
    assert delta_poly(fam).is_zero()


def test_delta_on_twenty_build(derive):
    cfg, triple, ctx, fam = derive(2, 20, "1/2", 4)
    delta = delta_poly(fam)
    assert not delta.is_zero()
    assert delta.degree <= 3 * cfg.D + 3 * cfg.M_cap
    m = sympy.Matrix([[to_sympy(fam.square[k][i]) for i in range(3)] for k in range(3)])
    assert sympy.expand(m.det() - to_sympy(delta)) == 0


@pytest.mark.parametrize("n0", [97, 10**6 + 3])
def test_certificate_at_generic_point(derive, n0):
    cfg, triple, ctx, fam = derive(2, 20, "1/2", 4)
    cert = rank3_certificate(ctx, fam, Fraction(1, n0), cfg)
    assert cert.a == 0 and cert.indices == (0, 1, 2)
    assert cert.det_value != 0 and cert.square_rank == 3
    angle = [[fam.angle[k][i](Fraction(1, n0)) for i in range(3)] for k in range(3)]
    assert sympy.Matrix(angle).det() == cert.det_value
    assert check_transformation(fam, Fraction(1, n0), 2).passed


def test_certificate_where_delta_vanishes():
    """All three polynomials share a double root at alpha, so a >= 1 and (0, 1, 2) fails."""
    from padebrocard.forge import make_context

    ctx = make_context(2, 4, 2, 4)
    alpha = Fraction(1, 97)
    base = Poly([-alpha, 1]) ** 2 * 97**2
    fam = build_family(ctx, (base, base * Poly([0, 1]), base * Poly([1, 0, 1])), 2)
    delta = delta_poly(fam)
    cert = rank3_certificate(ctx, fam, alpha)
    assert cert.a == delta.ord_at(alpha) >= 1
    assert cert.indices != (0, 1, 2) and cert.indices[2] <= cert.a + 2
    assert cert.det_value != 0


def test_root_of_T_is_refused(derive):
    cfg, triple, ctx, fam = derive(2, 20, "1/2", 4)
    with pytest.raises(PreconditionFailed):
        rank3_certificate(ctx, fam, Fraction(1, 3), cfg)
    with pytest.raises(PreconditionFailed):
        rank3_certificate(ctx, fam, 0, cfg)


def test_degenerate_regime_is_refused(derive):
    cfg, triple, ctx, fam = derive(2, 10, "1/2", 4)
    with pytest.raises(PreconditionFailed):
        rank3_certificate(ctx, fam, Fraction(1, 97), cfg)


def test_zeroed_column_is_rank_deficient(derive):
    cfg, triple, ctx, fam = derive(2, 20, "1/2", 4)
    zero = Poly([])
    square = [(row[0], row[1], zero) for row in fam.square]
    angle = [(row[0], row[1], zero) for row in fam.angle]
    broken = DerivedFamily(square, angle, fam.q_table, fam.base_degree, fam.M_cap)
    with pytest.raises(RankDeficient):
        rank3_certificate(ctx, broken, Fraction(1, 97))


def test_delta_rank_report(derive):
    cfg, triple, ctx, fam = derive(3, 20, "1/2", 4)
    rep, certs = delta_rank_report(ctx, fam, cfg, [Fraction(1, 97), Fraction(1, 10**6 + 3)])
    assert rep.passed and len(certs) == 2
