"""Exact 1-D densities, moduli of continuity, seminorms, mixtures, distances.

Densities are piecewise polynomial with exact integrals everywhere: absolute
values are handled by splitting at isolated real roots, so every quantity
here is computed to roundoff rather than by quadrature.  The functional
sigma is evaluated as a small linear program over piecewise-linear test
functions on a uniform grid and certified through the dual program.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .poly import Polynomial1D
from .roots import real_roots_simple

Interval = tuple[float, float]


def merge_intervals(intervals: Iterable[Interval]) -> tuple[Interval, ...]:
    """Sort and merge overlapping intervals; drops empty ones."""
    items = sorted((float(a), float(b)) for a, b in intervals if b > a)
    out: list[Interval] = []
    for a, b in items:
        if out and a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return tuple(out)


def integral_abs_poly(p: Polynomial1D, a: float, b: float) -> float:
    """Exact integral of |p| over [a, b] by splitting at real roots.

    A cheap derivative bound skips root isolation on sign-definite pieces;
    between roots the sign is constant, so |integral| per segment is exact
    regardless of root localization error.
    """
    if b <= a:
        return 0.0
    if p.is_zero:
        return 0.0
    if p.degree() == 0:
        return abs(p.coeffs[0]) * (b - a)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    scale = max(abs(a), abs(b))
    deriv_bound = sum(
        abs(c) * i * scale ** (i - 1) for i, c in enumerate(p.coeffs) if i
    )
    pm = p.eval(mid)
    if abs(pm) > half * deriv_bound:
        return abs(p.integral(a, b))
    cuts = [a] + [r for r in real_roots_simple(p, a, b) if a < r < b] + [b]
    anti = p.antiderivative()
    vals = [anti.eval(t) for t in cuts]
    return math.fsum(abs(v2 - v1) for v1, v2 in zip(vals, vals[1:]))


def poly_total_variation(p: Polynomial1D, a: float, b: float) -> float:
    """Total variation of p on [a, b]: sum of |increments| between critical points."""
    if p.degree() <= 0 or b <= a:
        return 0.0
    cuts = [a] + [r for r in real_roots_simple(p.derivative(), a, b) if a < r < b] + [b]
    vals = [p.eval(t) for t in cuts]
    return math.fsum(abs(v2 - v1) for v1, v2 in zip(vals, vals[1:]))


def poly_max_abs(p: Polynomial1D, a: float, b: float) -> float:
    """Exact max of |p| on [a, b] via critical points."""
    cand = [a, b] + [r for r in real_roots_simple(p.derivative(), a, b) if a < r < b]
    return max(abs(p.eval(t)) for t in cand)


@dataclass(frozen=True, eq=False)
class PiecewiseDensity1D:
    """Piecewise-polynomial function on the line, zero outside [t_0, t_M].

    Pieces are polynomials in the absolute coordinate.  Signed pieces are
    allowed (difference measures); probability densities have mass 1 and
    nonnegative pieces.
    """

    breakpoints: tuple[float, ...]
    pieces: tuple[Polynomial1D, ...]

    def __post_init__(self) -> None:
        bps = tuple(float(t) for t in self.breakpoints)
        if len(bps) < 2:
            raise ValueError("need at least two breakpoints")
        if any(b <= a for a, b in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if len(self.pieces) != len(bps) - 1:
            raise ValueError("need exactly one piece per interval")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "pieces", tuple(self.pieces))

    # ----------------------------------------------------------- constructors

    @staticmethod
    def uniform(a: float, b: float) -> "PiecewiseDensity1D":
        return PiecewiseDensity1D((a, b), (Polynomial1D.constant(1.0 / (b - a)),))

    @staticmethod
    def step(breakpoints: Sequence[float], values: Sequence[float]) -> "PiecewiseDensity1D":
        return PiecewiseDensity1D(
            tuple(breakpoints), tuple(Polynomial1D.constant(v) for v in values)
        )

    @staticmethod
    def tent(a: float, b: float) -> "PiecewiseDensity1D":
        """Triangular probability density on [a, b]."""
        m = 0.5 * (a + b)
        h = 2.0 / (b - a)
        up = Polynomial1D((-h * a / (m - a), h / (m - a)))
        down = Polynomial1D((h * b / (b - m), -h / (b - m)))
        return PiecewiseDensity1D((a, m, b), (up, down))

    @staticmethod
    def from_function(
        fn: Callable[[np.ndarray], np.ndarray],
        breakpoints: Sequence[float],
        degree: int = 6,
    ) -> "PiecewiseDensity1D":
        """Per-piece Chebyshev interpolant of ``fn`` (approximation, not exact)."""
        bps = tuple(float(t) for t in breakpoints)
        pieces = []
        k = np.arange(degree + 1)
        cheb = np.cos((2 * k + 1) * np.pi / (2 * (degree + 1)))
        for a, b in zip(bps, bps[1:]):
            x = 0.5 * (a + b) + 0.5 * (b - a) * cheb
            y = fn(x)
            cs = np.polynomial.polynomial.polyfit(x, y, degree)
            pieces.append(Polynomial1D(tuple(cs)))
        return PiecewiseDensity1D(bps, tuple(pieces))

    # ----------------------------------------------------------------- basics

    @property
    def support(self) -> Interval:
        return self.breakpoints[0], self.breakpoints[-1]

    @property
    def is_piecewise_constant(self) -> bool:
        return all(p.degree() == 0 for p in self.pieces)

    def eval(self, t: float) -> float:
        i = np.searchsorted(self.breakpoints, t, side="right") - 1
        if i < 0 or i >= len(self.pieces):
            # right endpoint belongs to the last piece
            if t == self.breakpoints[-1]:
                return self.pieces[-1].eval(t)
            return 0.0
        return self.pieces[i].eval(t)

    def eval_many(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        idx = np.searchsorted(self.breakpoints, t, side="right") - 1
        idx[t == self.breakpoints[-1]] = len(self.pieces) - 1
        for i, piece in enumerate(self.pieces):
            mask = idx == i
            if mask.any():
                out[mask] = piece.eval_many(t[mask])
        inside = (t >= self.breakpoints[0]) & (t <= self.breakpoints[-1])
        out[~inside] = 0.0
        return out

    @cached_property
    def _piece_antiderivatives(self) -> tuple[Polynomial1D, ...]:
        return tuple(p.antiderivative() for p in self.pieces)

    @cached_property
    def _piece_derivative_roots(self) -> tuple[tuple[float, ...], ...]:
        out = []
        for p, a, b in zip(self.pieces, self.breakpoints, self.breakpoints[1:]):
            if p.degree() <= 1:
                out.append(())
            else:
                out.append(tuple(real_roots_simple(p.derivative(), a, b)))
        return tuple(out)

    @cached_property
    def _cum(self) -> tuple[float, ...]:
        masses = [p.integral(a, b) for p, a, b in zip(self.pieces, self.breakpoints, self.breakpoints[1:])]
        cum = [0.0]
        for m in masses:
            cum.append(cum[-1] + m)
        return tuple(cum)

    @cached_property
    def mass(self) -> float:
        return math.fsum(
            p.integral(a, b)
            for p, a, b in zip(self.pieces, self.breakpoints, self.breakpoints[1:])
        )

    def cdf(self, t: float) -> float:
        if t <= self.breakpoints[0]:
            return 0.0
        if t >= self.breakpoints[-1]:
            return self._cum[-1]
        i = int(np.searchsorted(self.breakpoints, t, side="right") - 1)
        return self._cum[i] + self.pieces[i].integral(self.breakpoints[i], t)

    def integral(self, a: float, b: float) -> float:
        if b <= a:
            return 0.0
        return self.cdf(b) - self.cdf(a)

    def integral_over(self, intervals: Iterable[Interval]) -> float:
        return math.fsum(self.integral(a, b) for a, b in intervals)

    def integral_against(self, q: Polynomial1D) -> float:
        """Exact integral of q(t) * rho(t) dt."""
        return math.fsum(
            (piece * q).integral(a, b)
            for piece, a, b in zip(self.pieces, self.breakpoints, self.breakpoints[1:])
        )

    def abs_integral(self) -> float:
        return math.fsum(
            integral_abs_poly(p, a, b)
            for p, a, b in zip(self.pieces, self.breakpoints, self.breakpoints[1:])
        )

    @cached_property
    def sup_norm(self) -> float:
        return max(
            poly_max_abs(p, a, b)
            for p, a, b in zip(self.pieces, self.breakpoints, self.breakpoints[1:])
        )

    # --------------------------------------------------------- transformations

    def translate(self, delta: float) -> "PiecewiseDensity1D":
        """Density of X + delta: breakpoints shift, pieces recompose exactly."""
        return PiecewiseDensity1D(
            tuple(t + delta for t in self.breakpoints),
            tuple(p.compose_affine(-delta, 1.0) for p in self.pieces),
        )

    def scale_values(self, c: float) -> "PiecewiseDensity1D":
        return PiecewiseDensity1D(self.breakpoints, tuple(p * c for p in self.pieces))

    def normalized(self) -> "PiecewiseDensity1D":
        m = self.mass
        if m <= 0:
            raise ValueError("cannot normalize a density with nonpositive mass")
        return self.scale_values(1.0 / m)

    def __neg__(self) -> "PiecewiseDensity1D":
        return self.scale_values(-1.0)

    def restrict_piecewise(self, a: float, b: float) -> "PiecewiseDensity1D":
        """Restriction to [a, b] (zero outside); [a, b] must meet the support."""
        lo = max(a, self.breakpoints[0])
        hi = min(b, self.breakpoints[-1])
        if hi <= lo:
            raise ValueError("restriction interval misses the support")
        bps = [lo] + [t for t in self.breakpoints if lo < t < hi] + [hi]
        pieces = []
        for u, v in zip(bps, bps[1:]):
            i = int(np.searchsorted(self.breakpoints, 0.5 * (u + v), side="right") - 1)
            pieces.append(self.pieces[i])
        return PiecewiseDensity1D(tuple(bps), tuple(pieces))


def combine(
    r1: PiecewiseDensity1D, r2: PiecewiseDensity1D, op: Callable[[Polynomial1D, Polynomial1D], Polynomial1D]
) -> PiecewiseDensity1D:
    """Pointwise combination over the merged breakpoint grid."""
    bps = sorted(set(r1.breakpoints) | set(r2.breakpoints))
    zero = Polynomial1D.zero()

    def piece_at(r: PiecewiseDensity1D, u: float, v: float) -> Polynomial1D:
        mid = 0.5 * (u + v)
        if mid < r.breakpoints[0] or mid > r.breakpoints[-1]:
            return zero
        i = int(np.searchsorted(r.breakpoints, mid, side="right") - 1)
        return r.pieces[i]

    pieces = tuple(op(piece_at(r1, u, v), piece_at(r2, u, v)) for u, v in zip(bps, bps[1:]))
    return PiecewiseDensity1D(tuple(bps), pieces)


def density_sub(r1: PiecewiseDensity1D, r2: PiecewiseDensity1D) -> PiecewiseDensity1D:
    return combine(r1, r2, lambda p, q: p - q)


# ---------------------------------------------------------------------------
# BV seminorm, shift distance, modulus of continuity
# ---------------------------------------------------------------------------


def bv_seminorm(rho: PiecewiseDensity1D) -> float:
    """Total variation of the distributional derivative: jumps + interior variation."""
    bps, pieces = rho.breakpoints, rho.pieces
    parts = [abs(pieces[0].eval(bps[0])), abs(pieces[-1].eval(bps[-1]))]
    for i in range(1, len(bps) - 1):
        parts.append(abs(pieces[i].eval(bps[i]) - pieces[i - 1].eval(bps[i])))
    for p, a, b in zip(pieces, bps, bps[1:]):
        parts.append(poly_total_variation(p, a, b))
    return math.fsum(parts)


def shift_l1(rho: PiecewiseDensity1D, h: float) -> float:
    """Exact L1 distance between rho and its translate by h.

    Computed for |h| so the symmetry in h holds identically.  Regions where
    only one of the two translates is supported integrate the original
    pieces in their own frame; difference polynomials are only formed on
    genuine overlaps, which keeps narrow pieces far from the shift scale
    numerically safe.
    """
    h = abs(float(h))
    if h == 0.0:
        return 0.0
    bps = rho.breakpoints
    lo, hi = bps[0], bps[-1]
    cuts = sorted({t - h for t in bps} | set(bps))
    parts = []
    for u, v in zip(cuts, cuts[1:]):
        mid = 0.5 * (u + v)
        in_shifted = lo <= mid + h <= hi
        in_plain = lo <= mid <= hi
        if in_shifted and in_plain:
            i = int(np.searchsorted(bps, mid + h, side="right") - 1)
            j = int(np.searchsorted(bps, mid, side="right") - 1)
            i = min(i, len(rho.pieces) - 1)
            j = min(j, len(rho.pieces) - 1)
            if i == j and not any(
                u < r < v + h for r in rho._piece_derivative_roots[i]
            ):
                # same piece, monotone across [u, v+h]: the difference keeps
                # one sign, so the antiderivative gives |integral| directly
                anti = rho._piece_antiderivatives[i]
                parts.append(
                    abs(
                        (anti.eval(v + h) - anti.eval(u + h))
                        - (anti.eval(v) - anti.eval(u))
                    )
                )
                continue
            diff = rho.pieces[i].shift_arg(h) - rho.pieces[j]
            parts.append(integral_abs_poly(diff, u, v))
        elif in_shifted:
            i = min(int(np.searchsorted(bps, mid + h, side="right") - 1), len(rho.pieces) - 1)
            parts.append(integral_abs_poly(rho.pieces[i], u + h, v + h))
        elif in_plain:
            j = min(int(np.searchsorted(bps, mid, side="right") - 1), len(rho.pieces) - 1)
            parts.append(integral_abs_poly(rho.pieces[j], u, v))
    return math.fsum(parts)


def omega(rho: PiecewiseDensity1D, eps: float, grid: int = 1024, rel_tol: float = 1e-6) -> float:
    """Integral modulus of continuity: sup of shift_l1 over |h| <= eps.

    Exact for piecewise-constant densities (shift_l1 is piecewise affine in h
    with kinks only at breakpoint differences); otherwise a dense h-grid with
    golden-section refinement around the best point.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if rho.is_piecewise_constant:
        bps = rho.breakpoints
        cands = {eps}
        for i, ti in enumerate(bps):
            for tj in bps[:i]:
                d = ti - tj
                if 0.0 < d <= eps:
                    cands.add(d)
        return max(shift_l1(rho, h) for h in cands)

    hs = np.linspace(eps / grid, eps, grid)
    vals = [shift_l1(rho, h) for h in hs]
    k = int(np.argmax(vals))
    lo = hs[max(k - 1, 0)]
    hi = hs[min(k + 1, grid - 1)]
    best = vals[k]
    # golden-section refinement of the bracketing triple
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = shift_l1(rho, c), shift_l1(rho, d)
    while (b - a) > rel_tol * eps:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = shift_l1(rho, c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = shift_l1(rho, d)
        best = max(best, fc, fd)
    return best


# ---------------------------------------------------------------------------
# grid measures and the sigma linear program
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GridMeasure1D:
    """Measure on a uniform grid of cells [left + j*h, left + (j+1)*h).

    Weights are cell masses; signed weights are allowed for difference
    measures.
    """

    left: float
    h: float
    weights: np.ndarray

    def __post_init__(self) -> None:
        if not self.h > 0:
            raise ValueError("cell width must be positive")
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a nonempty 1-D array")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        object.__setattr__(self, "weights", w)

    @property
    def ncells(self) -> int:
        return int(self.weights.size)

    def total(self) -> float:
        return float(math.fsum(self.weights.tolist()))

    def edges(self) -> np.ndarray:
        return self.left + self.h * np.arange(self.ncells + 1)

    def centers(self) -> np.ndarray:
        return self.left + self.h * (np.arange(self.ncells) + 0.5)

    @staticmethod
    def from_density(rho: PiecewiseDensity1D, h: float) -> "GridMeasure1D":
        """Exact cell masses of a piecewise density on a grid of width h."""
        a, b = rho.support
        ncells = max(1, int(math.ceil((b - a) / h - 1e-12)))
        edges = a + h * np.arange(ncells + 1)
        cdfs = np.array([rho.cdf(t) for t in edges])
        cdfs[-1] = rho.cdf(b)
        return GridMeasure1D(a, h, np.diff(cdfs))

    def measure_of_intervals(self, intervals: Iterable[Interval]) -> float:
        """Mass of a union of intervals, with cells split pro rata at edges."""
        edges = self.edges()
        total = 0.0
        for a, b in intervals:
            lo = np.clip(a, edges[0], edges[-1])
            hi = np.clip(b, edges[0], edges[-1])
            if hi <= lo:
                continue
            i0 = int(np.searchsorted(edges, lo, side="right") - 1)
            i1 = int(np.searchsorted(edges, hi, side="left") - 1)
            i0 = min(max(i0, 0), self.ncells - 1)
            i1 = min(max(i1, 0), self.ncells - 1)
            if i0 == i1:
                total += self.weights[i0] * (hi - lo) / self.h
            else:
                total += self.weights[i0] * (edges[i0 + 1] - lo) / self.h
                total += float(np.sum(self.weights[i0 + 1 : i1]))
                total += self.weights[i1] * (hi - edges[i1]) / self.h
        return total

    def to_csv_row(self) -> str:
        parts = [repr(self.left), repr(self.h)] + [repr(float(w)) for w in self.weights]
        return ",".join(parts)

    @staticmethod
    def from_csv_row(row: str) -> "GridMeasure1D":
        parts = [float(x) for x in row.strip().split(",") if x != ""]
        if len(parts) < 3:
            raise ValueError("grid CSV row needs left, h and at least one weight")
        return GridMeasure1D(parts[0], parts[1], np.array(parts[2:]))


def sigma(nu: GridMeasure1D, eps: float, certify: bool = True) -> float:
    """Exact LP value of sup { int phi' d nu : |phi| <= eps, |phi'| <= 1 }.

    Test functions are piecewise linear on the grid nodes; by convention the
    value at eps = 0 is 0.  With ``certify`` the dual program is solved as an
    independent method and the two optima must agree to 1e-8.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if eps == 0.0:
        return 0.0
    h = nu.h
    if h > eps / 10 + 1e-15 * eps:
        raise ValueError(f"grid too coarse for sigma: h={h} > eps/10={eps / 10}")
    w = nu.weights
    m = w.size
    # node objective: sum_j w_j (phi_{j+1} - phi_j)/h  ==  c . phi
    c = np.zeros(m + 1)
    c[0] = -w[0] / h
    c[-1] = w[-1] / h
    if m > 1:
        c[1:-1] = (w[:-1] - w[1:]) / h
    ones = np.ones(m)
    d_mat = sp.diags([-ones, np.ones(m)], offsets=[0, 1], shape=(m, m + 1), format="csr")
    eye = sp.eye(m + 1, format="csr")
    a_ub = sp.vstack([d_mat, -d_mat, eye, -eye], format="csr")
    b_ub = np.concatenate([np.full(2 * m, h), np.full(2 * (m + 1), eps)])
    opts = {
        "primal_feasibility_tolerance": 1e-10,
        "dual_feasibility_tolerance": 1e-10,
    }
    res = linprog(-c, A_ub=a_ub, b_ub=b_ub, bounds=(None, None), method="highs", options=opts)
    if not res.success:
        raise ArithmeticError(f"sigma LP failed: {res.message}")
    value = float(-res.fun)
    if certify:
        dual = linprog(
            b_ub,
            A_eq=a_ub.T.tocsr(),
            b_eq=c,
            bounds=(0, None),
            method="highs",
            options=opts,
        )
        if not dual.success:
            raise ArithmeticError(f"sigma dual LP failed: {dual.message}")
        gap = abs(float(dual.fun) - value)
        if gap > 1e-8 * max(1.0, abs(value)):
            raise ArithmeticError(f"sigma LP duality gap {gap:.3e} exceeds tolerance")
    return value


def sigma_of_density(
    rho: PiecewiseDensity1D,
    eps: float,
    rel_tol: float = 1e-4,
    max_doublings: int = 6,
    certify: bool = True,
) -> float:
    """sigma of a density: grid at h = eps/64, then doubling refinement.

    Refinement stops when successive values change by less than ``rel_tol``
    relatively, or after ``max_doublings`` grid doublings.
    """
    h = eps / 64.0
    prev = sigma(GridMeasure1D.from_density(rho, h), eps, certify=certify)
    for _ in range(max_doublings):
        h /= 2.0
        cur = sigma(GridMeasure1D.from_density(rho, h), eps, certify=certify)
        if abs(cur - prev) <= rel_tol * max(abs(cur), 1e-300):
            return cur
        prev = cur
    return prev


# ---------------------------------------------------------------------------
# Nikolskii-Besov seminorm
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BesovResult:
    value: float
    diverging: bool
    argmax_eps: float


def besov_seminorm(
    rho: PiecewiseDensity1D,
    alpha: float,
    eps_grid: Sequence[float],
    omega_grid: int = 1024,
) -> BesovResult:
    """max over the grid of eps^(-alpha) * omega(rho, eps), with divergence probe.

    The grid is refined downward three times (smallest eps halved each time);
    the result is flagged ``diverging`` when the maximizer sits at the
    smallest eps on every refinement while the maximum keeps growing.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must be in (0, 1]")
    grid = np.asarray(sorted(float(e) for e in eps_grid))
    if grid.size < 16:
        raise ValueError("eps grid needs at least 16 points")
    if grid[0] <= 0:
        raise ValueError("eps grid must be positive")

    cache: dict[float, float] = {}

    def w(e: float) -> float:
        if e not in cache:
            cache[e] = omega(rho, e, grid=omega_grid)
        return cache[e]

    def scan(g: np.ndarray) -> tuple[float, int]:
        vals = [w(e) / e**alpha for e in g]
        k = int(np.argmax(vals))
        return vals[k], k

    value, k = scan(grid)
    diverging = True
    prev_val = value
    g = grid
    for _ in range(3):
        ext = np.geomspace(g[0] / 2.0, g[0], 5)[:-1]
        g = np.concatenate([ext, g])
        val, k = scan(g)
        at_smallest = k == 0 and val > np.max([w(e) / e**alpha for e in g[1:4]]) * (
            1.0 - 1e-9
        )
        growing = val > prev_val * (1.0 + 1e-3)
        if not (at_smallest and growing):
            diverging = False
        prev_val = max(prev_val, val)
        value = max(value, val)
    return BesovResult(value=value, diverging=diverging, argmax_eps=float(g[k]))


# ---------------------------------------------------------------------------
# layer-cake mixture decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MixtureDecomposition:
    """Convex mixture of uniform densities: components (a, b, weight)."""

    components: tuple[tuple[float, float, float], ...]

    def __post_init__(self) -> None:
        for a, b, w in self.components:
            if not b > a:
                raise ValueError("component needs a < b")
            if not w > 0:
                raise ValueError("component weights must be positive")
        total = math.fsum(w for _, _, w in self.components)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"component weights sum to {total}, expected 1")

    def tv_total(self) -> float:
        """Sum of weight * 2/(b-a): the mixture side of the TV identity."""
        return math.fsum(w * 2.0 / (b - a) for a, b, w in self.components)

    def reconstruct(self) -> PiecewiseDensity1D:
        edges = sorted({x for a, b, _ in self.components for x in (a, b)})
        values = []
        for u, v in zip(edges, edges[1:]):
            mid = 0.5 * (u + v)
            values.append(
                math.fsum(
                    w / (b - a) for a, b, w in self.components if a <= mid <= b
                )
            )
        return PiecewiseDensity1D.step(edges, values)


def mixture_decompose(rho: PiecewiseDensity1D) -> MixtureDecomposition:
    """Layer-cake decomposition of a nonnegative piecewise-constant density.

    Each band between consecutive distinct values contributes one uniform
    component per maximal interval of the superlevel set, which reproduces
    the density exactly and satisfies the TV identity.
    """
    if not rho.is_piecewise_constant:
        raise ValueError("mixture decomposition needs a piecewise-constant density")
    values = [p.coeffs[0] for p in rho.pieces]
    if any(v < 0 for v in values):
        raise ValueError("mixture decomposition needs a nonnegative density")
    if abs(rho.mass - 1.0) > 1e-9:
        raise ValueError(f"density mass is {rho.mass}, expected 1")
    levels = sorted({v for v in values if v > 0})
    bands = list(zip([0.0] + levels[:-1], levels))
    comps: list[tuple[float, float, float]] = []
    bps = rho.breakpoints
    for lo, hi in bands:
        runs: list[Interval] = []
        for i, v in enumerate(values):
            if v >= hi - 1e-15 * max(hi, 1.0):
                seg = (bps[i], bps[i + 1])
                if runs and runs[-1][1] == seg[0]:
                    runs[-1] = (runs[-1][0], seg[1])
                else:
                    runs.append(seg)
        for a, b in runs:
            comps.append((a, b, (hi - lo) * (b - a)))
    total = math.fsum(w for _, _, w in comps)
    comps = [(a, b, w / total) for a, b, w in comps]
    return MixtureDecomposition(tuple(comps))


# ---------------------------------------------------------------------------
# distances between probability densities
# ---------------------------------------------------------------------------


def distances(rho1: PiecewiseDensity1D, rho2: PiecewiseDensity1D) -> tuple[float, float]:
    """(d_tv, d_k): L1 distance of densities and L1 distance of their CDFs."""
    for r in (rho1, rho2):
        if abs(r.mass - 1.0) > 1e-9:
            raise ValueError(f"distances need probability densities, mass={r.mass}")
    diff = density_sub(rho1, rho2)
    d_tv = diff.abs_integral()
    # CDF difference is piecewise polynomial on the merged grid and vanishes
    # outside the joint support.
    bps = diff.breakpoints
    parts = []
    g0 = 0.0
    for piece, a, b in zip(diff.pieces, bps, bps[1:]):
        anti = piece.antiderivative()
        seg = anti.compose_affine(0.0, 1.0) - anti.eval(a) + g0
        parts.append(integral_abs_poly(seg, a, b))
        g0 = g0 + anti.eval(b) - anti.eval(a)
    d_k = math.fsum(parts)
    return d_tv, d_k


# ---------------------------------------------------------------------------
# density literal format
# ---------------------------------------------------------------------------


def density_to_literal(rho: PiecewiseDensity1D) -> str:
    bps = ",".join(repr(t) for t in rho.breakpoints)
    pieces = "; ".join(p.to_text() for p in rho.pieces)
    return f"piecewise [{bps}] [{pieces}]"


def density_from_literal(text: str) -> PiecewiseDensity1D:
    """Parse ``piecewise [t0,t1,...] [p0; p1; ...]`` with polynomial text pieces."""
    src = text.strip()
    if not src.startswith("piecewise"):
        raise ValueError("density literal must start with 'piecewise'")
    body = src[len("piecewise") :].strip()
    if body.count("[") < 2 or body.count("]") < 2:
        raise ValueError("density literal needs two bracketed lists")
    first_open = body.index("[")
    first_close = body.index("]", first_open)
    second_open = body.index("[", first_close)
    second_close = body.rindex("]")
    bps = [float(x) for x in body[first_open + 1 : first_close].split(",") if x.strip()]
    pieces_text = body[second_open + 1 : second_close]
    pieces = [Polynomial1D.from_text(chunk) for chunk in pieces_text.split(";")]
    return PiecewiseDensity1D(tuple(bps), tuple(pieces))
