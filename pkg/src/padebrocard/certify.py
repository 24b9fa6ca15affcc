"""Nonvanishing of the determinant polynomial and rank-three certificates at a point."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import LemmaViolation, PreconditionFailed, RankDeficient, ZeroPolynomial
from .forge import DerivedFamily, OperatorContext, build_family
from .kernel import Poly, exact
from .pade import PadeConfig
from .report import CheckReport


def det3(m) -> object:
    """Determinant of a 3x3 matrix over any commutative ring (rule of Sarrus)."""
    return (
        m[0][0] * m[1][1] * m[2][2]
        + m[0][1] * m[1][2] * m[2][0]
        + m[0][2] * m[1][0] * m[2][1]
        - m[0][2] * m[1][1] * m[2][0]
        - m[0][0] * m[1][2] * m[2][1]
        - m[0][1] * m[1][0] * m[2][2]
    )


def _det3_cofactor(m, row: int):
    """Laplace expansion along ``row``, an independent route to det3."""
    total = None
    for col in range(3):
        minor = [[m[i][j] for j in range(3) if j != col] for i in range(3) if i != row]
        sub = minor[0][0] * minor[1][1] - minor[0][1] * minor[1][0]
        term = m[row][col] * sub
        if (row + col) % 2:
            term = -term
        total = term if total is None else total + term
    return total


def delta_poly(family: DerivedFamily, cross_check: bool = True) -> Poly:
    """det of the rows square[0], square[1], square[2]; degree <= 3D + 3M."""
    if family.k_max < 2:
        raise ValueError("family must be built through k = 2")
    m = [list(family.square[k]) for k in range(3)]
    delta = det3(m)
    if cross_check:
        for row in range(3):
            if _det3_cofactor(m, row) != delta:
                raise LemmaViolation(f"cofactor expansion along row {row} disagrees with the determinant")
    cap = 3 * family.base_degree + 3 * family.M_cap
    if not delta.is_zero() and delta.degree > cap:
        raise LemmaViolation(f"deg delta = {delta.degree} exceeds 3D + 3M = {cap}")
    return delta


def ord_by_derivatives(Q: Poly, alpha) -> int:
    """Number of leading derivatives of Q vanishing at alpha."""
    if Q.is_zero():
        raise ZeroPolynomial("order of vanishing of the zero polynomial")
    j = 0
    while Q(alpha) == 0:
        Q = Q.derivative()
        j += 1
    return j


def low_order_point(Q: Poly, points: Sequence) -> tuple[object, int]:
    """The first point of minimal vanishing order; that order is <= deg Q / len(points)."""
    if Q.is_zero():
        raise ZeroPolynomial("low-order point of the zero polynomial")
    pts = [exact(p) for p in points]
    if not pts:
        raise ValueError("need at least one point")
    if len(set(pts)) != len(pts):
        raise ValueError("points must be distinct")
    best, best_ord = None, None
    for p in pts:
        o = Q.ord_at(p)
        if best_ord is None or o < best_ord:
            best, best_ord = p, o
            if o == 0:
                break
    if best_ord * len(pts) > Q.degree:
        raise LemmaViolation(f"minimal order {best_ord} exceeds deg/t = {Q.degree}/{len(pts)}")
    return best, best_ord


def rank(rows: Sequence[Sequence]) -> int:
    """Rank over Q by exact Gaussian elimination."""
    m = [[Fraction(x) for x in row] for row in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rk = 0
    for c in range(ncols):
        piv = next((i for i in range(rk, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rk], m[piv] = m[piv], m[rk]
        for i in range(rk + 1, len(m)):
            if m[i][c]:
                f = m[i][c] / m[rk][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[rk])]
        rk += 1
    return rk


@dataclass(frozen=True)
class IndependenceCertificate:
    delta: Poly
    alpha: Fraction
    a: int
    indices: tuple[int, int, int]
    det_value: Fraction
    square_rank: int

    def to_json(self) -> dict:
        return {
            "alpha": str(self.alpha),
            "a": self.a,
            "indices": list(self.indices),
            "det_value": str(self.det_value),
            "delta_degree": self.delta.degree,
            "square_rank": self.square_rank,
        }


def _ensure_depth(ctx: OperatorContext, family: DerivedFamily, k_needed: int) -> DerivedFamily:
    if family.k_max >= k_needed:
        return family
    return build_family(ctx, family.square[0], k_needed, family.base_degree)


def angle_matrix(family: DerivedFamily, alpha, ks: Sequence[int]) -> list[list[Fraction]]:
    return [[Fraction(family.angle[k][i](alpha)) for i in range(3)] for k in ks]


def rank3_certificate(ctx: OperatorContext, family: DerivedFamily, alpha, cfg: PadeConfig | None = None) -> IndependenceCertificate:
    """First (k0 < k1 < k2 <= a + 2), ordered by (k2, k1, k0), with nonzero angle determinant at alpha."""
    alpha = Fraction(exact(alpha))
    if alpha == 0:
        raise PreconditionFailed("alpha must be nonzero")
    if ctx.T(alpha) == 0:
        raise PreconditionFailed(f"alpha = {alpha} is a root of T")
    if cfg is not None and not cfg.nondegenerate_regime:
        raise PreconditionFailed(
            f"D = {cfg.D} does not exceed (M + 2)/(1 - eps0) = {Fraction(cfg.M_cap + 2) / (1 - cfg.eps0)}"
        )
    delta = delta_poly(family)
    if delta.is_zero():
        raise RankDeficient("determinant polynomial vanishes identically")
    a = delta.ord_at(alpha)
    if ord_by_derivatives(delta, alpha) != a:
        raise LemmaViolation("vanishing order by synthetic division disagrees with the derivative count")
    family = _ensure_depth(ctx, family, a + 2)

    vals = {k: [Fraction(family.angle[k][i](alpha)) for i in range(3)] for k in range(a + 3)}
    for k2 in range(2, a + 3):
        for k1 in range(1, k2):
            for k0 in range(k1):
                d = det3([vals[k0], vals[k1], vals[k2]])
                if d != 0:
                    sq_rows = [[Fraction(family.square[k][i](alpha)) for i in range(3)] for k in range(a + 3)]
                    sq_rank = rank(sq_rows)
                    if sq_rank != 3:
                        raise RankDeficient(f"square-bracket matrix at alpha has rank {sq_rank}")
                    return IndependenceCertificate(delta, alpha, a, (k0, k1, k2), d, sq_rank)
    raise RankDeficient(f"no nonsingular 3x3 minor among k <= {a + 2} at alpha = {alpha}")


def check_transformation(family: DerivedFamily, alpha, k_top: int, strict: bool = True) -> CheckReport:
    """Square rows equal M(alpha) times angle rows, with M unitriangular up to the factors j!."""
    alpha = Fraction(exact(alpha))
    q = family.q_table
    rep = CheckReport(f"transformation alpha={alpha} k<={k_top}")
    ang = angle_matrix(family, alpha, range(k_top + 1))
    for k in range(k_top + 1):
        row = [Fraction(family.square[k][i](alpha)) for i in range(3)]
        if k == 0:
            pred = ang[0]
        else:
            pred = [0, 0, 0]
            for j in range(1, k + 1):
                w = math.factorial(j) * Fraction(q[k][j](alpha))
                pred = [p + w * a for p, a in zip(pred, ang[j])]
        rep.add(f"row k={k}", row == pred, k=k)
    det_m = math.prod(math.factorial(j) for j in range(k_top + 1))
    rep.add("det M(alpha) = prod j!", det_m != 0, det=det_m)
    if strict:
        rep.raise_if_failed()
    return rep


def delta_rank_report(ctx: OperatorContext, family: DerivedFamily, cfg: PadeConfig, alphas: Sequence, strict: bool = True) -> tuple[CheckReport, list[IndependenceCertificate]]:
    rep = CheckReport(f"delta-rank D={cfg.D} M={cfg.M_cap} eps0={cfg.eps0}")
    delta = delta_poly(family)
    cap = 3 * cfg.D + 3 * cfg.M_cap
    rep.add("delta nonzero", not delta.is_zero(), degree=delta.degree)
    rep.add("deg delta <= 3D + 3M", delta.degree <= cap, degree=delta.degree, cap=cap)
    certs = []
    for alpha in alphas:
        try:
            cert = rank3_certificate(ctx, family, alpha, cfg)
        except (RankDeficient, LemmaViolation) as exc:
            rep.add(f"certificate alpha={alpha}", False, error=str(exc))
            continue
        certs.append(cert)
        family = _ensure_depth(ctx, family, cert.a + 2)
        ok = cert.det_value != 0 and cert.indices[2] <= cert.a + 2 and cert.square_rank == 3
        rep.add(f"certificate alpha={alpha}", ok, **cert.to_json())
        rep.extend(check_transformation(family, alpha, cert.a + 2, strict=False))
    if strict:
        rep.raise_if_failed()
    return rep, certs
