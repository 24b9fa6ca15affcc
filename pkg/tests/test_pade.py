from fractions import Fraction

import pytest

from oracles import omega_by_ode
from padebrocard.errors import DegenerateConfig, LemmaViolation
from padebrocard.kernel import Poly
from padebrocard.pade import (
    check_nondegenerate,
    check_pade_bounds,
    make_config,
    pade_system,
    remainder_series,
    triple_from_polys,
    within_coefficient_bound,
)


@pytest.fixture(scope="module")
def small(build):
    return build(2, 10, "1/2")


def test_config_validation():
    cfg = make_config(2, 2, 4, 4, 10, Fraction(1, 2))
    assert cfg.order == 25
    assert not cfg.nondegenerate_regime
    assert make_config(2, 2, 4, 4, 20, Fraction(1, 2)).nondegenerate_regime
    for bad in [(1, 2, 4, 4, 10, "1/2"), (2, 4, 4, 4, 10, "1/2"), (2, 2, 4, 3, 10, "1/2"), (2, 2, 4, 4, 9, "1/2"), (2, 2, 4, 4, 10, "0")]:
        with pytest.raises(DegenerateConfig):
            make_config(*bad[:5], Fraction(bad[5]))


def test_system_shape_and_integrality():
    cfg = make_config(2, 2, 4, 4, 10, Fraction(1, 2))
    sys = pade_system(cfg)
    assert (sys.rows, sys.cols) == (cfg.order - cfg.D, 2 * cfg.D + 2)
    assert all(isinstance(a, int) for row in sys.entries for a in row)


def test_small_build_vanishes_to_25(small):
    cfg, triple = small
    assert triple.vanish_order >= 25
    assert all(p.degree <= 10 for p in triple.P)
    assert all(p.is_integral() for p in triple.P)


def test_vanishing_confirmed_by_ode_expansion(small):
    """Expand sum P_i w_i to order 40 with coefficients from an independent recurrence."""
    cfg, triple = small
    w1, w2 = omega_by_ode(2, 2, 40), omega_by_ode(2, 4, 40)
    P0, P1, P2 = triple.P
    r = [P0[v] + sum(P1[k] * w1[v - k] + P2[k] * w2[v - k] for k in range(min(v, 10) + 1)) for v in range(41)]
    first = next(v for v, c in enumerate(r) if c != 0)
    assert first == triple.vanish_order + 1
    assert first > 25
    assert all(r[v] == triple.remainder[v] for v in range(min(triple.remainder.order, 40) + 1))


def test_bounds_and_divisibility(small):
    cfg, triple = small
    rep = check_pade_bounds(triple)
    assert rep.passed
    scale = 2 ** (2 * cfg.order)
    assert all(Fraction(c) % scale == 0 for p in triple.P[1:] for c in p.coeffs)


def test_remainder_examples():
    cfg = make_config(2, 2, 4, 4, 10, Fraction(1, 2))
    r = remainder_series((Poly([1]), Poly([]), Poly([])), cfg, 5)
    assert list(r.coeffs[:1]) == [1] and all(r[v] == 0 for v in range(1, 6))
    r = remainder_series((Poly([-1]), Poly([1]), Poly([])), cfg, 3)
    assert [r[v] for v in range(3)] == [0, Fraction(1, 2), Fraction(3, 8)]


def test_nondegenerate_gate(build):
    _, small_triple = build(2, 10, "1/2")
    rep = check_nondegenerate(small_triple)
    assert [c.name for c in rep.checks] == ["at least one P_i nonzero"]
    cfg, triple = build(2, 20, "1/2")
    assert check_nondegenerate(triple).passed
    assert all(not p.is_zero() for p in triple.P)


def test_injected_single_polynomial_is_rejected():
    cfg = make_config(2, 2, 4, 4, 20, Fraction(1, 2))
    injected = triple_from_polys([Poly([1]), Poly([]), Poly([])], cfg)
    with pytest.raises(LemmaViolation):
        check_nondegenerate(injected)
    assert not check_nondegenerate(injected, strict=False).passed


def test_coefficient_bound_rejects_oversized_values():
    cfg = make_config(2, 2, 4, 4, 10, Fraction(1, 2))
    assert within_coefficient_bound(cfg, 10**20, 0)
    assert not within_coefficient_bound(cfg, 10**200, 0)
    assert within_coefficient_bound(cfg, -(10**200), 500)


def test_corrupted_triple_loses_vanishing(small):
    cfg, triple = small
    P0 = triple.P[0] + Poly([0, 0, 1])
    broken = triple_from_polys([P0, triple.P[1], triple.P[2]], cfg)
    assert broken.vanish_order == 1
    assert not check_pade_bounds(broken, strict=False).passed
