import copy
from fractions import Fraction

import mpmath
import pytest
import sympy

from oracles import mp_value
from padebrocard.errors import DegenerateParams, PropertyViolation, ThetaTooLarge
from padebrocard.pade import make_config
from padebrocard.pipeline import (
    chi,
    chi_leading,
    compute_params,
    exponent_function,
    log_factorial_ball,
    optimize_exponent,
    run_desk_pipeline,
    verify_properties,
)

N0 = 10**6 + 3


@pytest.fixture(scope="module")
def desk_run():
    cfg = make_config(2, 2, 4, 4, 20, Fraction(1, 2))
    return run_desk_pipeline(cfg, N0)


def _contains(ball, value):
    with mpmath.workdps(80):
        return mp_value(ball.lower()) <= value <= mp_value(ball.upper())


def test_optimum_matches_closed_forms():
    opt = optimize_exponent()
    with mpmath.workdps(80):
        root2 = mpmath.sqrt(2)
        assert _contains(opt.eps0, 2 - root2)
        assert _contains(opt.theta, 17 - 12 * root2)
        assert _contains(opt.exponent, 12 * root2 - 16)
    assert opt.eps0.radius < Fraction(1, 10**20)
    assert opt.below_33_34


def test_critical_quadratic_matches_sympy():
    e = sympy.Symbol("e")
    f = e * (1 - e) / ((3 - e) * (4 - e))
    numer = sympy.Poly(sympy.numer(sympy.together(sympy.diff(f, e))), e)
    ours = sympy.Poly(sum(sympy.Rational(str(c)) * e**k for k, c in enumerate(optimize_exponent().critical_quadratic)), e)
    assert sympy.simplify(numer.as_expr() / ours.as_expr()).is_constant()
    assert sympy.nsimplify(sympy.solve(numer.as_expr(), e)[0]) in {2 - sympy.sqrt(2), 2 + sympy.sqrt(2)}


def test_exponent_function_peak_value():
    assert exponent_function(Fraction(1, 2)) == Fraction(1, 35)


def test_chi_leading_examples():
    assert chi_leading(Fraction(1, 100), Fraction(1, 2)) == Fraction(43, 56)
    assert chi_leading(0, Fraction(1, 3)) == 1 / (2 - Fraction(1, 3))
    opt = optimize_exponent(256)
    lead = chi_leading(opt.theta, opt.eps0)
    assert lead.contains(1) and lead.radius < Fraction(1, 10**12)
    with pytest.raises(DegenerateParams):
        chi_leading(Fraction(1, 2), Fraction(1, 2))


@pytest.mark.parametrize("n", [0, 1, 10, 2000, 2001, 10**6, 10**12])
def test_log_factorial_against_loggamma(n):
    b = log_factorial_ball(n, 160)
    with mpmath.workdps(80):
        assert _contains(b, mpmath.loggamma(n + 1))
    assert b.radius < Fraction(1, 10**6)


def test_asymptotic_mode_parameters():
    N = 10**30
    p = compute_params(N, theta=Fraction(1, 100), eps0=Fraction(1, 2))
    assert p.M == 1  # floor(10^0.3)
    assert p.D is not None and p.D >= 1
    with mpmath.workdps(60):
        assert _contains(p.logs["C"], mpmath.log(2 * N))
        assert _contains(p.logs["U"], mpmath.mpf(15) / 2 * mpmath.log(4 * 16 * 1))
    with pytest.raises(DegenerateParams):
        compute_params(10**6, theta=Fraction(1, 100), eps0=Fraction(1, 2))
    with pytest.raises(ThetaTooLarge):
        compute_params(10**6, theta=Fraction(1, 20), eps0=Fraction(1, 2))
    with pytest.raises(ValueError):
        compute_params(10**6, script_N=3 * 10**6, theta=Fraction(1, 100))


def test_ratio_sign_at_desk_scale():
    small = compute_params(10**6, mode="desk", M=4, eps0=Fraction(1, 2))
    assert small.log_W_over_C.upper() < 0 and small.D is None
    with mpmath.workdps(60):
        want = mpmath.mpf(5) / 2 * mpmath.log(10**6) - 10 * mpmath.log(16 * 16 * 4) - mpmath.log(2 * 10**6)
        assert _contains(small.log_W_over_C, want)
    big = compute_params(10**21, mode="desk", M=4, eps0=Fraction(1, 2))
    assert big.log_W_over_C.is_positive() and big.D >= 1
    value, lead = chi(big)
    assert value.is_positive() and lead is None


def test_desk_pipeline_properties(desk_run):
    m = desk_run.matrix
    assert desk_run.report.passed
    assert m.certificate.a == 0
    assert m.Z == 2**2 * N0 ** (20 + 2 * 4)
    assert sympy.Matrix([[sympy.Rational(str(x)) for x in row] for row in m.p]).det() == m.det != 0
    assert all((m.Z * x).denominator == 1 for row in m.p for x in row)


def test_residuals_against_mpmath(desk_run):
    m = desk_run.matrix
    with mpmath.workdps(400):
        w = [mpmath.mpf(1)] + [
            mpmath.fprod([(1 - mpmath.mpf(j) / N0) ** (-mpmath.mpf(1) / 2) for j in range(1, beta)]) for beta in (2, 4)
        ]
        for j, ball in enumerate(m.residuals):
            val = mpmath.fsum(mp_value(m.p[i][j], 400) * w[i] for i in range(3))
            assert mp_value(ball.lower(), 400) <= val <= mp_value(ball.upper(), 400)


def test_perturbed_entry_breaks_property_four(desk_run):
    broken = copy.copy(desk_run.matrix)
    broken.p = [row[:] for row in desk_run.matrix.p]
    broken.p[0][0] += 1
    rep = verify_properties(broken, desk_run.params, desk_run.triple, strict=False)
    assert any(c.name.startswith("property 4") for c in rep.failures)
    with pytest.raises(PropertyViolation):
        verify_properties(broken, desk_run.params, desk_run.triple)
