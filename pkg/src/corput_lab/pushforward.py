"""Densities and CDFs of image measures mu o f^{-1}.

One-dimensional images of exact piecewise densities are computed through
root isolation (exact CDFs, root-sum densities); multidimensional images
fall back to seeded Monte Carlo histograms with per-cell standard errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .density import GridMeasure1D, Interval, PiecewiseDensity1D
from .measures import SampleableMeasureND, sample
from .poly import Polynomial, Polynomial1D
from .roots import real_roots_simple

CRITICAL_EXCLUSION_STEPS = 2.0


def sublevel_intervals_1d(
    g: Polynomial1D, s: float, support: Interval
) -> tuple[Interval, ...]:
    """The set {t in support : g(t) <= s} as a union of intervals."""
    if g.degree() == 0:
        return (support,) if g.coeffs[0] <= s else ()
    a, b = support
    cuts = [a] + [r for r in real_roots_simple(g - s, a, b) if a < r < b] + [b]
    out = []
    for u, v in zip(cuts, cuts[1:]):
        if g.eval(0.5 * (u + v)) <= s:
            out.append((u, v))
    merged: list[Interval] = []
    for iv in out:
        if merged and merged[-1][1] == iv[0]:
            merged[-1] = (merged[-1][0], iv[1])
        else:
            merged.append(iv)
    return tuple(merged)


def pushforward_cdf_1d(rho: PiecewiseDensity1D, g: Polynomial1D, s: float) -> float:
    """F(s) = rho({t : g(t) <= s}), resolved exactly through root isolation."""
    if g.degree() == 0:
        raise ValueError("pushforward under a constant map is degenerate")
    intervals = sublevel_intervals_1d(g, s, rho.support)
    return rho.integral_over(intervals)


@dataclass(frozen=True, eq=False)
class DensityTable1D:
    """Pointwise density values on a uniform grid; NaN marks excluded points."""

    s: np.ndarray
    density: np.ndarray
    h: float

    @property
    def defined(self) -> np.ndarray:
        return ~np.isnan(self.density)


def pushforward_density_1d(
    rho: PiecewiseDensity1D, g: Polynomial1D, s_grid: Sequence[float]
) -> DensityTable1D:
    """Root-sum density of the image measure on a uniform grid.

    Grid points within two grid steps of a critical value g(t*) with
    g'(t*) = 0 are reported as NaN rather than regularized; the density
    there lives only in L^1.
    """
    if g.degree() == 0:
        raise ValueError("pushforward under a constant map is degenerate")
    s = np.asarray(s_grid, dtype=float)
    if s.ndim != 1 or s.size < 2:
        raise ValueError("s_grid must contain at least two points")
    steps = np.diff(s)
    h = float(steps[0])
    if not np.allclose(steps, h, rtol=1e-9, atol=0):
        raise ValueError("s_grid must be uniform")
    a, b = rho.support
    gp = g.derivative()
    crit_vals = [g.eval(r) for r in real_roots_simple(gp, a, b)]
    excl = CRITICAL_EXCLUSION_STEPS * h
    out = np.empty_like(s)
    for i, si in enumerate(s):
        if any(abs(si - cv) < excl for cv in crit_vals):
            out[i] = math.nan
            continue
        parts = []
        for r in real_roots_simple(g - float(si), a, b):
            parts.append(rho.eval(r) / abs(gp.eval(r)))
        out[i] = math.fsum(parts)
    return DensityTable1D(s, out, h)


@dataclass(frozen=True, eq=False)
class PushforwardResult:
    """Image-measure summary: histogram, CDF, and provenance."""

    grid_density: GridMeasure1D
    cdf: Callable[[np.ndarray], np.ndarray]
    cdf_table: np.ndarray  # rows (s, F(s)) at cell edges
    method: str
    mc_count: int | None = None
    seed: int | None = None
    stderr: np.ndarray | None = None

    def density_values(self) -> np.ndarray:
        return self.grid_density.weights / self.grid_density.h


def pushforward_exact_1d(
    rho: PiecewiseDensity1D, g: Polynomial1D, bins: int = 512
) -> PushforwardResult:
    """Exact pushforward of an exact density: cell masses from the exact CDF."""
    if g.degree() == 0:
        raise ValueError("pushforward under a constant map is degenerate")
    a, b = rho.support
    # image range: critical values and endpoint values bound the support
    cand = [g.eval(a), g.eval(b)] + [g.eval(r) for r in real_roots_simple(g.derivative(), a, b)]
    lo, hi = min(cand), max(cand)
    if hi <= lo:
        raise ValueError("degenerate image range")
    edges = np.linspace(lo, hi, bins + 1)
    cdf_at = np.array([pushforward_cdf_1d(rho, g, s) for s in edges])
    grid = GridMeasure1D(lo, (hi - lo) / bins, np.diff(cdf_at))

    def cdf(sv: np.ndarray) -> np.ndarray:
        sv = np.atleast_1d(np.asarray(sv, dtype=float))
        return np.array([pushforward_cdf_1d(rho, g, float(x)) for x in sv])

    table = np.column_stack([edges, cdf_at])
    return PushforwardResult(grid, cdf, table, method="exact1d")


def pushforward_mc(
    mu: SampleableMeasureND,
    f: Polynomial,
    count: int,
    bins: int = 512,
    seed: int = 0,
    clip_quantile: float = 1e-6,
) -> PushforwardResult:
    """Monte Carlo histogram of f under mu with an empirical CDF.

    The histogram range is clipped to the [q, 1-q] empirical quantiles to
    keep moduli computed downstream stable on heavy-tailed images; the CDF
    keeps the full sample.
    """
    if count < 10**4:
        raise ValueError("MC pushforward needs count >= 1e4")
    pts = sample(mu, count, seed)
    vals = f.eval_many(pts)
    vals.sort()
    lo = float(np.quantile(vals, clip_quantile))
    hi = float(np.quantile(vals, 1.0 - clip_quantile))
    if hi <= lo:
        raise ValueError("degenerate sample range: f is constant on the support")
    counts, edges = np.histogram(vals, bins=bins, range=(lo, hi))
    weights = counts / count
    grid = GridMeasure1D(lo, (hi - lo) / bins, weights)
    stderr = np.sqrt(weights * (1.0 - weights) / count)

    def cdf(sv: np.ndarray) -> np.ndarray:
        sv = np.atleast_1d(np.asarray(sv, dtype=float))
        return np.searchsorted(vals, sv, side="right") / count

    table = np.column_stack([edges, cdf(edges)])
    return PushforwardResult(
        grid, cdf, table, method="mc", mc_count=count, seed=seed, stderr=stderr
    )
