"""Initial Padé-type triples P0 + P1*w1 + P2*w2 vanishing to high order at 0."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .ball import decide_le, log_ball
from .errors import ConstructionFailed, DegenerateConfig
from .kernel import Poly, Series, exact
from .omega import OmegaSpec, omega_series
from .report import CheckReport
from .siegel import HomogeneousSystem, solve_small

_LN2_UPPER = Fraction(6931471805599454, 10**16)  # just above ln 2


@dataclass(frozen=True)
class PadeConfig:
    r: int
    beta1: int
    beta2: int
    M_cap: int
    D: int
    eps0: Fraction

    def __post_init__(self):
        object.__setattr__(self, "eps0", Fraction(exact(self.eps0)))
        if self.r < 2:
            raise DegenerateConfig(f"r must be >= 2, got {self.r}")
        if not (self.r <= self.beta1 < self.beta2 <= self.M_cap):
            raise DegenerateConfig(
                f"need r <= beta1 < beta2 <= M, got r={self.r}, beta1={self.beta1}, beta2={self.beta2}, M={self.M_cap}"
            )
        if self.D < 10:
            raise DegenerateConfig(f"D must be >= 10, got {self.D}")
        if not (Fraction(1, 100) <= self.eps0 <= Fraction(99, 100)):
            raise DegenerateConfig(f"eps0 must lie in [1/100, 99/100], got {self.eps0}")
        if self.order <= self.D:
            raise DegenerateConfig("vanishing order does not exceed D: no equations to solve")

    @property
    def order(self) -> int:
        """Target vanishing order floor((3 - eps0) D)."""
        return math.floor((3 - self.eps0) * self.D)

    @property
    def omegas(self) -> tuple[OmegaSpec, OmegaSpec]:
        return OmegaSpec(self.r, self.beta1), OmegaSpec(self.r, self.beta2)

    @property
    def nondegenerate_regime(self) -> bool:
        """D > (M + 2)/(1 - eps0), where all three polynomials are forced nonzero."""
        return self.D > (self.M_cap + 2) / (1 - self.eps0)

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "M": self.M_cap,
            "D": self.D,
            "eps0": str(self.eps0),
            "order": self.order,
        }


@dataclass(frozen=True)
class PadeTriple:
    P: tuple[Poly, Poly, Poly]
    remainder: Series
    vanish_order: int
    cfg: PadeConfig

    def to_json(self) -> dict:
        return {
            "config": self.cfg.to_json(),
            "P": [p.to_json() for p in self.P],
            "degrees": [p.degree for p in self.P],
            "vanish_order": self.vanish_order,
            "window": self.remainder.order,
        }


def _polys(triple) -> tuple[Poly, Poly, Poly]:
    ps = triple.P if isinstance(triple, PadeTriple) else triple
    ps = tuple(p if isinstance(p, Poly) else Poly([p]) for p in ps)
    if len(ps) != 3:
        raise ValueError("expected three polynomials")
    return ps


def remainder_series(triple, cfg: PadeConfig, L: int) -> Series:
    """Exact coefficients r_0..r_L of P0 + P1*w1 + P2*w2."""
    if L < 0:
        raise ValueError("L must be >= 0")
    p0, p1, p2 = _polys(triple)
    s1, s2 = cfg.omegas
    return Series.from_poly(p0, L) + omega_series(s1, L).mul_poly(p1) + omega_series(s2, L).mul_poly(p2)


def _vanish_order(rem: Series) -> int:
    val = rem.valuation()
    return rem.order if val is None else val - 1


def pade_system(cfg: PadeConfig) -> HomogeneousSystem:
    """Rows v = D+1..order in the unknowns p_{1,0..D}, p_{2,0..D}, scaled to integers."""
    order, D = cfg.order, cfg.D
    scale = cfg.r ** (2 * order)
    b1, b2 = (omega_series(s, order) for s in cfg.omegas)
    rows = []
    for v in range(D + 1, order + 1):
        row = []
        for b in (b1, b2):
            for k in range(D + 1):
                e = scale * Fraction(b[v - k])
                if e.denominator != 1:
                    raise ConstructionFailed(f"scaled omega coefficient b_{v - k} is not integral")
                row.append(e.numerator)
        rows.append(row)
    return HomogeneousSystem(rows)


def build_initial_pade(cfg: PadeConfig, window: int | None = None) -> PadeTriple:
    order, D = cfg.order, cfg.D
    L = order + D + 1 if window is None else window
    if L < order:
        raise ValueError(f"window {L} is shorter than the vanishing order {order}")
    scale = cfg.r ** (2 * order)
    X = solve_small(pade_system(cfg))
    x1, x2 = X[: D + 1], X[D + 1 :]

    b1, b2 = (omega_series(s, D) for s in cfg.omegas)
    p0 = []
    for v in range(D + 1):
        acc = Fraction(0)
        for k in range(v + 1):
            acc += x1[k] * b1[v - k] + x2[k] * b2[v - k]
        t = -scale * acc
        if t.denominator != 1:
            raise ConstructionFailed(f"p_0,{v} is not integral")
        p0.append(t.numerator)

    P = (Poly(p0), Poly([scale * c for c in x1]), Poly([scale * c for c in x2]))
    rem = remainder_series(P, cfg, L)
    vo = _vanish_order(rem)
    if vo < order:
        raise ConstructionFailed(f"remainder has nonzero coefficient r_{vo + 1} below order {order}")
    return PadeTriple(P, rem, vo, cfg)


def coefficient_bound_log(cfg: PadeConfig, v: int, prec: int = 64):
    """Ball enclosing ln of 4^(M/eps0) (4 r^4 M)^((2-eps0)(3-eps0)D/eps0) (2M)^v."""
    e = cfg.eps0
    return (
        log_ball(4, prec) * (cfg.M_cap / e)
        + log_ball(4 * cfg.r**4 * cfg.M_cap, prec) * ((2 - e) * (3 - e) * cfg.D / e)
        + log_ball(2 * cfg.M_cap, prec) * v
    )


def within_coefficient_bound(cfg: PadeConfig, value, v: int) -> bool:
    q = Fraction(exact(value))
    if q == 0:
        return True
    # cheap acceptance: |q| < 2^bits, so ln|q| < max(bits, 0) * ln 2
    bits = abs(q.numerator).bit_length() - q.denominator.bit_length() + 1
    if max(bits, 0) * _LN2_UPPER < coefficient_bound_log(cfg, v).lower():
        return True
    return decide_le(lambda p: log_ball(abs(q), p), lambda p: coefficient_bound_log(cfg, v, p))


def check_pade_bounds(triple: PadeTriple, strict: bool = True) -> CheckReport:
    """Integrality, degrees, vanishing, divisibility and both coefficient bound families."""
    cfg = triple.cfg
    rep = CheckReport(f"pade-build r={cfg.r} D={cfg.D} eps0={cfg.eps0}")
    scale = cfg.r ** (2 * cfg.order)
    rep.add("some P_i nonzero", any(not p.is_zero() for p in triple.P))
    for i, p in enumerate(triple.P):
        rep.add(f"P{i} integral", p.is_integral(), P=p)
        rep.add(f"deg P{i} <= D", p.degree <= cfg.D, degree=p.degree, D=cfg.D)
        for v, c in enumerate(p.coeffs):
            ok = within_coefficient_bound(cfg, c, v)
            if not ok:
                rep.add(f"|p_{i},{v}| bound", False, value=c)
        if i > 0:
            bad = [k for k, c in enumerate(p.coeffs) if Fraction(c) % scale != 0]
            rep.add(f"r^(2O) divides p_{i},k", not bad, modulus=scale, failing_k=bad)
    rep.add("coefficient bound p_i,v", not any(c.name.startswith("|p_") for c in rep.checks))
    rep.add("vanishing order", triple.vanish_order >= cfg.order, vanish_order=triple.vanish_order, order=cfg.order)
    bad_r = [v for v, c in enumerate(triple.remainder.coeffs) if not within_coefficient_bound(cfg, c, v)]
    rep.add("remainder bound r_v", not bad_r, window=triple.remainder.order, failing_v=bad_r)
    if strict:
        rep.raise_if_failed()
    return rep


def check_nondegenerate(triple, cfg: PadeConfig | None = None, strict: bool = True) -> CheckReport:
    """At least one P_i is nonzero; all three are when D > (M+2)/(1-eps0)."""
    cfg = cfg or triple.cfg
    P = _polys(triple)
    nonzero = [not p.is_zero() for p in P]
    rep = CheckReport(f"nondegenerate D={cfg.D} M={cfg.M_cap} eps0={cfg.eps0}")
    rep.add("at least one P_i nonzero", any(nonzero), nonzero=nonzero)
    if cfg.nondegenerate_regime:
        rep.add("all three P_i nonzero", all(nonzero), nonzero=nonzero, threshold=Fraction(cfg.M_cap + 2) / (1 - cfg.eps0))
    if strict:
        rep.raise_if_failed()
    return rep


def make_config(r: int, beta1: int, beta2: int, M: int, D: int, eps0) -> PadeConfig:
    return PadeConfig(r, beta1, beta2, M, D, Fraction(exact(eps0)))


def triple_from_polys(polys: Sequence, cfg: PadeConfig, L: int | None = None) -> PadeTriple:
    """Wrap arbitrary polynomials (e.g. injected test cases) as a triple."""
    P = _polys(polys)
    L = cfg.order + cfg.D + 1 if L is None else L
    rem = remainder_series(P, cfg, L)
    return PadeTriple(P, rem, _vanish_order(rem), cfg)
