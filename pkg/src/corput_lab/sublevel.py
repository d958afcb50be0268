"""Sublevel-set measures, divided differences, quantile point selection.

The one-dimensional paths are exact (root isolation + piecewise integrals);
multidimensional sublevel masses are Monte Carlo indicator means with
binomial standard errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .density import Interval, PiecewiseDensity1D, merge_intervals
from .measures import SampleableMeasureND, ProductMeasure, UniformBody, Box, sample
from .poly import Polynomial, Polynomial1D
from .pushforward import sublevel_intervals_1d

QUANTILE_THRESHOLD_BASE = 4.0 * math.e  # base of the reported separation threshold


def sublevel_intervals_abs(
    f: Polynomial1D, eps: float, support: Interval
) -> tuple[Interval, ...]:
    """{t in support : |f(t)| <= eps} as a union of intervals."""
    below = sublevel_intervals_1d(f, eps, support)
    above = sublevel_intervals_1d(-f, eps, support)  # f >= -eps
    out = []
    for a1, b1 in below:
        for a2, b2 in above:
            lo, hi = max(a1, a2), min(b1, b2)
            if hi > lo:
                out.append((lo, hi))
    return merge_intervals(out)


def sublevel_measure_1d(rho: PiecewiseDensity1D, f: Polynomial1D, eps: float) -> float:
    """Exact mu(|f| <= eps) for an exact 1-D density."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return rho.integral_over(sublevel_intervals_abs(f, eps, rho.support))


def sublevel_measure_mc(
    mu: SampleableMeasureND,
    f: Polynomial,
    eps: float,
    count: int = 10**5,
    seed: int = 0,
) -> tuple[float, float]:
    """(estimate, stderr) of mu(|f| <= eps) by Monte Carlo indicator mean."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    pts = sample(mu, count, seed)
    vals = np.abs(f.eval_many(pts))
    p = float(np.mean(vals <= eps))
    return p, math.sqrt(p * (1.0 - p) / count)


# ---------------------------------------------------------------------------
# divided differences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DividedDiffCert:
    """Points a_0 < ... < a_k and coefficients reproducing k! * leading coeff.

    c_m = (-1)^k k! prod_{j != m} (a_j - a_m)^{-1}; applied to a polynomial of
    degree k the combination sum c_m p(a_m) equals k! times its leading
    coefficient, and annihilates lower degrees.
    """

    points: tuple[float, ...]
    coefficients: tuple[float, ...]

    @property
    def k(self) -> int:
        return len(self.points) - 1

    def apply(self, p: Polynomial1D) -> float:
        return math.fsum(c * p.eval(a) for c, a in zip(self.coefficients, self.points))

    def apply_values(self, values: Sequence[float]) -> float:
        return math.fsum(c * v for c, v in zip(self.coefficients, values))


def divided_diff(points: Sequence[float]) -> DividedDiffCert:
    pts = tuple(sorted(float(a) for a in points))
    k = len(pts) - 1
    if k < 1:
        raise ValueError("need at least two points")
    span = pts[-1] - pts[0]
    min_gap = min(b - a for a, b in zip(pts, pts[1:]))
    if min_gap <= 1e-10 * max(span, 1e-300):
        raise ValueError(f"coincident points: min gap {min_gap} vs span {span}")
    sign = (-1.0) ** k
    kfac = float(math.factorial(k))
    coeffs = []
    for m, am in enumerate(pts):
        prod = 1.0
        for j, aj in enumerate(pts):
            if j != m:
                prod *= aj - am
        coeffs.append(sign * kfac / prod)
    return DividedDiffCert(pts, tuple(coeffs))


# ---------------------------------------------------------------------------
# quantile point selection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuantileReport:
    points: tuple[float, ...]
    min_product: float
    threshold: float
    measure_e: float


def _cdf_restricted(rho: PiecewiseDensity1D, e_set: tuple[Interval, ...], x: float) -> float:
    """F_E(x) = mu((-inf, x] intersect E)."""
    return math.fsum(rho.integral(a, min(b, x)) for a, b in e_set if x > a)


def quantile_points(
    rho: PiecewiseDensity1D, e_set: Sequence[Interval], k: int
) -> QuantileReport:
    """Points a_j in E with F_E(a_j) = (j/k) mu(E), plus the separation report.

    E is already a finite union of compact intervals, so the selection
    achieves the reported (mu(E)/(4e))^k threshold with a factor 2^k to
    spare.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    e_merged = merge_intervals(e_set)
    if not e_merged:
        raise ValueError("E is empty")
    mass = rho.integral_over(e_merged)
    if mass <= 0:
        raise ValueError("E has zero measure")
    lo = e_merged[0][0]
    hi = e_merged[-1][1]
    pts = [lo]
    for j in range(1, k + 1):
        target = (j / k) * mass
        a, b = lo, hi
        # leftmost x with F_E(x) >= target
        if _cdf_restricted(rho, e_merged, b) < target:
            pts.append(hi)
            continue
        for _ in range(200):
            mid = 0.5 * (a + b)
            if mid <= a or mid >= b:
                break
            if _cdf_restricted(rho, e_merged, mid) >= target:
                b = mid
            else:
                a = mid
        pts.append(b)
    sup = rho.sup_norm
    products = []
    for m in range(k + 1):
        prod = sup**k
        for j in range(k + 1):
            if j != m:
                prod *= abs(pts[j] - pts[m])
        products.append(prod)
    threshold = (mass / QUANTILE_THRESHOLD_BASE) ** k
    return QuantileReport(tuple(pts), min(products), threshold, mass)


# ---------------------------------------------------------------------------
# Carbery-Wright ratio sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CwRatioResult:
    pairs: tuple[tuple[float, float], ...]
    max_ratio: float
    argmax_t: float
    l2_norm: float
    degree: int
    method: str


def _l2_norm(mu, f: Polynomial, pts: np.ndarray | None) -> float:
    """L2(mu) norm of f: exact for boxes and products, MC otherwise."""
    f2 = f * f
    if isinstance(mu, UniformBody) and isinstance(mu.body, Box):
        return math.sqrt(max(f2.box_rescale(mu.body.intervals).cube_moment(), 0.0))
    if isinstance(mu, ProductMeasure):
        total = 0.0
        for e, c in f2.terms.items():
            v = c
            for rho_j, ej in zip(mu.factors, e):
                if ej:
                    v *= rho_j.integral_against(Polynomial1D((0.0,) * ej + (1.0,)))
            total += v
        return math.sqrt(max(total, 0.0))
    if pts is None:
        raise ValueError("MC L2 norm needs sample points")
    return float(np.sqrt(np.mean(f.eval_many(pts) ** 2)))


def cw_ratio(
    mu,
    f,
    t_grid: Sequence[float] | None = None,
    count: int = 10**5,
    seed: int = 0,
) -> CwRatioResult:
    """Sweep of ||f||_{L2}^{1/d} mu(|f| <= t) / t^{1/d} over the t grid.

    For a 1-D exact density the sublevel masses are exact; otherwise one
    shared Monte Carlo sample serves every t.
    """
    if t_grid is None:
        t_grid = np.geomspace(1e-4, 1.0, 16)
    ts = np.asarray(sorted(float(t) for t in t_grid))
    if np.any(ts <= 0):
        raise ValueError("t grid must be positive")

    if isinstance(mu, PiecewiseDensity1D):
        if not isinstance(f, Polynomial1D):
            raise ValueError("1-D measure needs a univariate polynomial")
        if f.degree() == 0:
            raise ValueError("f must be non-constant on the support")
        d = f.degree()
        l2 = math.sqrt(max(mu.integral_against(f * f), 0.0))
        if l2 <= 0:
            raise ValueError("vanishing L2 norm")
        pairs = []
        for t in ts:
            m = sublevel_measure_1d(mu, f, float(t))
            pairs.append((float(t), l2 ** (1.0 / d) * m / t ** (1.0 / d)))
        method = "exact1d"
    else:
        if f.is_zero or f.degree() == 0:
            raise ValueError("f must be non-constant on the support")
        d = f.degree()
        pts = sample(mu, count, seed)
        vals = np.sort(np.abs(f.eval_many(pts)))
        l2 = _l2_norm(mu, f, pts)
        if l2 <= 0:
            raise ValueError("vanishing L2 norm")
        pairs = []
        for t in ts:
            m = float(np.searchsorted(vals, t, side="right")) / count
            pairs.append((float(t), l2 ** (1.0 / d) * m / t ** (1.0 / d)))
        method = "mc"

    ratios = [r for _, r in pairs]
    k = int(np.argmax(ratios))
    return CwRatioResult(
        pairs=tuple(pairs),
        max_ratio=ratios[k],
        argmax_t=pairs[k][0],
        l2_norm=l2,
        degree=d,
        method=method,
    )
