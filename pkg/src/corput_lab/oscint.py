"""Oscillatory integrals with polynomial phase, normalization, decay fits.

One-dimensional integrals against exact densities split the support at
stationary points and keep the per-panel phase variation below 2*pi before
applying fixed-order Gauss-Legendre; low-dimensional cubes use the same
budget with recursive box subdivision; everything else is seeded Monte
Carlo.  Error estimates come from one panel-halving pass.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .density import PiecewiseDensity1D, integral_abs_poly
from .measures import Box, ProductMeasure, UniformBody, sample
from .poly import Polynomial, Polynomial1D
from .roots import real_roots_simple

PANEL_CAP = 200_000
PHASE_BUDGET = 2.0 * math.pi
MC_NOISE_FLOOR_FACTOR = 5.0

_GL16 = np.polynomial.legendre.leggauss(16)
_GL12 = np.polynomial.legendre.leggauss(12)
_GL8 = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class OscValue:
    t: float
    value: complex
    abs_error_estimate: float
    method: str


# ---------------------------------------------------------------------------
# exact 1-D path
# ---------------------------------------------------------------------------


def _panels_exact_1d(
    rho: PiecewiseDensity1D, f: Polynomial1D, t: float
) -> list[tuple[float, float, Polynomial1D]] | None:
    """Monotone-phase panels with |t| * (phase variation) <= 2*pi each."""
    fp = f.derivative()
    panels: list[tuple[float, float, Polynomial1D]] = []
    for piece, a, b in zip(rho.pieces, rho.breakpoints, rho.breakpoints[1:]):
        cuts = [a] + [r for r in real_roots_simple(fp, a, b) if a < r < b] + [b]
        for u, v in zip(cuts, cuts[1:]):
            stack = [(u, v)]
            while stack:
                x, y = stack.pop()
                if abs(t) * abs(f.eval(y) - f.eval(x)) <= PHASE_BUDGET:
                    panels.append((x, y, piece))
                    if len(panels) > PANEL_CAP:
                        return None
                else:
                    mid = 0.5 * (x + y)
                    stack.append((x, mid))
                    stack.append((mid, y))
    return panels


def _gl_sum_1d(
    panels: list[tuple[float, float, Polynomial1D]], f: Polynomial1D, t: float
) -> complex:
    nodes, weights = _GL16
    total = 0.0 + 0.0j
    for x, y, piece in panels:
        mid = 0.5 * (x + y)
        half = 0.5 * (y - x)
        pts = mid + half * nodes
        amp = piece.eval_many(pts)
        phase = f.eval_many(pts)
        total += half * np.sum(weights * amp * np.exp(1j * t * phase))
    return complex(total)


def _halved(panels: list[tuple[float, float, Polynomial1D]]):
    out = []
    for x, y, piece in panels:
        mid = 0.5 * (x + y)
        out.append((x, mid, piece))
        out.append((mid, y, piece))
    return out


def _osc_exact_1d(rho: PiecewiseDensity1D, f: Polynomial1D, t: float) -> OscValue | None:
    if t == 0.0:
        return OscValue(0.0, complex(rho.mass), 0.0, "exact1d")
    panels = _panels_exact_1d(rho, f, t)
    if panels is None or len(panels) * 2 > PANEL_CAP:
        return None
    coarse = _gl_sum_1d(panels, f, t)
    fine = _gl_sum_1d(_halved(panels), f, t)
    err = abs(fine - coarse) + 1e-15 * abs(rho.mass)
    return OscValue(t, fine, err, "exact1d")


# ---------------------------------------------------------------------------
# tensor path on boxes (n <= 3)
# ---------------------------------------------------------------------------


def _power_interval(lo: float, hi: float, j: int) -> tuple[float, float]:
    if j == 0:
        return 1.0, 1.0
    a, b = lo**j, hi**j
    if j % 2 == 0 and lo < 0.0 < hi:
        return 0.0, max(a, b)
    return min(a, b), max(a, b)


def _range_bound(f: Polynomial, lo: np.ndarray, hi: np.ndarray) -> tuple[float, float]:
    """Interval bound of f over the box (per-term product of power intervals)."""
    flo, fhi = 0.0, 0.0
    for e, c in f.terms.items():
        tlo, thi = c, c
        for k, j in enumerate(e):
            if j:
                plo, phi = _power_interval(float(lo[k]), float(hi[k]), j)
                cands = (tlo * plo, tlo * phi, thi * plo, thi * phi)
                tlo, thi = min(cands), max(cands)
        flo += tlo
        fhi += thi
    return flo, fhi


def _variation_bound(
    f: Polynomial, grads: list[Polynomial], lo: np.ndarray, hi: np.ndarray
) -> float:
    rlo, rhi = _range_bound(f, lo, hi)
    direct = rhi - rlo
    grad = 0.0
    for k, g in enumerate(grads):
        glo, ghi = _range_bound(g, lo, hi)
        grad += max(abs(glo), abs(ghi)) * (hi[k] - lo[k])
    return min(direct, grad)


def _osc_tensor_box(box: Box, f: Polynomial, t: float) -> OscValue | None:
    n = box.dim
    if n > 3:
        raise ValueError("tensor method supports dimension <= 3")
    if t == 0.0:
        return OscValue(0.0, 1.0 + 0.0j, 0.0, "tensor")
    grads = f.gradient()
    lo0 = np.array([a for a, _ in box.intervals])
    hi0 = np.array([b for _, b in box.intervals])
    leaves: list[tuple[np.ndarray, np.ndarray]] = []
    stack = [(lo0, hi0)]
    while stack:
        lo, hi = stack.pop()
        if abs(t) * _variation_bound(f, grads, lo, hi) <= PHASE_BUDGET:
            leaves.append((lo, hi))
            if len(leaves) > PANEL_CAP:
                return None
        else:
            k = int(np.argmax(hi - lo))
            mid = 0.5 * (lo[k] + hi[k])
            hi1 = hi.copy()
            hi1[k] = mid
            lo2 = lo.copy()
            lo2[k] = mid
            stack.append((lo, hi1))
            stack.append((lo2, hi))
    nodes, weights = {1: _GL16, 2: _GL12, 3: _GL8}[n]

    def leaf_value(lo: np.ndarray, hi: np.ndarray) -> complex:
        axes = [0.5 * (lo[k] + hi[k]) + 0.5 * (hi[k] - lo[k]) * nodes for k in range(n)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.column_stack([m.ravel() for m in mesh])
        wmesh = np.meshgrid(*([weights] * n), indexing="ij")
        w = np.ones(pts.shape[0])
        for wm in wmesh:
            w = w * wm.ravel()
        jac = math.prod(0.5 * (hi[k] - lo[k]) for k in range(n))
        return complex(jac * np.sum(w * np.exp(1j * t * f.eval_many(pts))))

    vol = box.volume()
    coarse = sum(leaf_value(lo, hi) for lo, hi in leaves) / vol
    fine_leaves: list[tuple[np.ndarray, np.ndarray]] = []
    for lo, hi in leaves:
        k = int(np.argmax(hi - lo))
        mid = 0.5 * (lo[k] + hi[k])
        hi1 = hi.copy()
        hi1[k] = mid
        lo2 = lo.copy()
        lo2[k] = mid
        fine_leaves.append((lo, hi1))
        fine_leaves.append((lo2, hi))
    fine = sum(leaf_value(lo, hi) for lo, hi in fine_leaves) / vol
    err = abs(fine - coarse) + 1e-15
    return OscValue(t, fine, err, "tensor")


# ---------------------------------------------------------------------------
# Monte Carlo path and the public dispatcher
# ---------------------------------------------------------------------------


def _osc_mc_values(vals: np.ndarray, t: float) -> complex:
    return complex(np.mean(np.exp(1j * t * vals)))


def osc_integral(
    mu,
    f,
    t: float,
    method: str = "auto",
    count: int = 10**6,
    seed: int = 0,
) -> OscValue:
    """int e^{i t f} d mu with an a-posteriori error estimate.

    ``auto`` picks the exact path for 1-D densities, the tensor path for
    boxes in dimension <= 3, and Monte Carlo otherwise.  When the panel
    budget is exhausted the call degrades to Monte Carlo with a warning.
    """
    if method == "auto":
        if isinstance(mu, PiecewiseDensity1D):
            method = "exact1d"
        elif isinstance(mu, UniformBody) and isinstance(mu.body, Box) and mu.dim <= 3:
            method = "tensor"
        else:
            method = "mc"

    if method == "exact1d":
        if not isinstance(mu, PiecewiseDensity1D):
            raise ValueError("exact1d needs a 1-D piecewise density")
        f1 = f if isinstance(f, Polynomial1D) else None
        if f1 is None:
            if f.n != 1:
                raise ValueError("exact1d needs a univariate phase")
            f1 = f.restrict_line([0.0], [1.0])
        out = _osc_exact_1d(mu, f1, t)
        if out is not None:
            return out
        warnings.warn("panel budget exceeded; degrading to Monte Carlo")
        mu = ProductMeasure((mu.normalized(),))
        f = f1.as_polynomial()
        method = "mc"

    if method == "tensor":
        if not (isinstance(mu, UniformBody) and isinstance(mu.body, Box)):
            raise ValueError("tensor method needs a uniform box measure")
        if mu.dim > 3:
            raise ValueError("tensor method supports dimension <= 3")
        out = _osc_tensor_box(mu.body, f, t)
        if out is not None:
            return out
        warnings.warn("panel budget exceeded; degrading to Monte Carlo")
        method = "mc"

    if method != "mc":
        raise ValueError(f"unknown method {method!r}")
    if isinstance(mu, PiecewiseDensity1D):
        mu = ProductMeasure((mu.normalized(),))
        if isinstance(f, Polynomial1D):
            f = f.as_polynomial()
    pts = sample(mu, count, seed)
    vals = f.eval_many(pts)
    return OscValue(t, _osc_mc_values(vals, t), 1.0 / math.sqrt(count), "mc")


def osc_sweep(
    mu,
    f,
    ts: Sequence[float],
    method: str = "auto",
    count: int = 10**6,
    seed: int = 0,
) -> list[OscValue]:
    """Sweep over t; the Monte Carlo sample is drawn once and shared."""
    resolved = method
    if resolved == "auto":
        if isinstance(mu, PiecewiseDensity1D):
            resolved = "exact1d"
        elif isinstance(mu, UniformBody) and isinstance(mu.body, Box) and mu.dim <= 3:
            resolved = "tensor"
        else:
            resolved = "mc"
    if resolved != "mc":
        return [osc_integral(mu, f, float(t), resolved, count, seed) for t in ts]
    if isinstance(mu, PiecewiseDensity1D):
        mu = ProductMeasure((mu.normalized(),))
        if isinstance(f, Polynomial1D):
            f = f.as_polynomial()
    pts = sample(mu, count, seed)
    vals = f.eval_many(pts)
    err = 1.0 / math.sqrt(count)
    return [OscValue(float(t), _osc_mc_values(vals, float(t)), err, "mc") for t in ts]


# ---------------------------------------------------------------------------
# phase normalization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NormalizedPhase:
    poly: Polynomial
    mean: float
    abs_moment: float
    abs_moment_error: float
    method: str


def _cube_abs_integral_2d(g: Polynomial, tol: float = 1e-10) -> tuple[float, float]:
    """integral of |g| over Q^2: exact in y per x, adaptive Simpson in x.

    The inner integral is exact through root splitting; the outer integrand
    is piecewise smooth with finitely many kinks, which the adaptive
    recursion localizes.
    """

    def inner(x: float) -> float:
        cs: dict[int, float] = {}
        for (ex, ey), c in g.terms.items():
            cs[ey] = cs.get(ey, 0.0) + c * x**ex
        deg = max(cs) if cs else 0
        py = Polynomial1D(tuple(cs.get(j, 0.0) for j in range(deg + 1)))
        return integral_abs_poly(py, -0.5, 0.5)

    def simpson(a: float, fa: float, m: float, fm: float, b: float, fb: float) -> float:
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, fa, m, fm, b, fb, whole, tol, depth) -> tuple[float, float]:
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = inner(lm), inner(rm)
        left = simpson(a, fa, lm, flm, m, fm)
        right = simpson(m, fm, rm, frm, b, fb)
        err = abs(left + right - whole) / 15.0
        if err <= tol or depth >= 48:
            return left + right + (left + right - whole) / 15.0, err
        lval, lerr = recurse(a, fa, lm, flm, m, fm, left, tol / 2.0, depth + 1)
        rval, rerr = recurse(m, fm, rm, frm, b, fb, right, tol / 2.0, depth + 1)
        return lval + rval, lerr + rerr

    a, b = -0.5, 0.5
    m = 0.0
    fa, fm, fb = inner(a), inner(m), inner(b)
    whole = simpson(a, fa, m, fm, b, fb)
    return recurse(a, fa, m, fm, b, fb, whole, tol, 0)


def _cube_abs_integral_certified(
    g: Polynomial, rel_tol: float, max_cells: int = 500_000
) -> tuple[float, float]:
    """Certified integral of |g| over Q^n by adaptive sign-region splitting.

    Returns (value, uncertainty); cells where the interval bound straddles
    zero are split along their longest axis until the residual bound fits
    the tolerance or the cell budget is reached.
    """
    n = g.n
    lo0 = np.full(n, -0.5)
    hi0 = np.full(n, 0.5)
    resolved = 0.0
    undecided = [(lo0, hi0)]

    def box_integral(lo: np.ndarray, hi: np.ndarray) -> float:
        vol = float(np.prod(hi - lo))
        return g.box_rescale(list(zip(lo, hi))).cube_moment() * vol

    for _ in range(200):
        if not undecided:
            return resolved, 0.0
        keep: list[tuple[np.ndarray, np.ndarray]] = []
        unc_lo = 0.0
        unc_hi = 0.0
        for lo, hi in undecided:
            blo, bhi = _range_bound(g, lo, hi)
            if blo >= 0.0:
                resolved += box_integral(lo, hi)
            elif bhi <= 0.0:
                resolved -= box_integral(lo, hi)
            else:
                keep.append((lo, hi))
                vol = float(np.prod(hi - lo))
                unc_lo += abs(box_integral(lo, hi))
                unc_hi += vol * max(abs(blo), abs(bhi))
        if not keep:
            return resolved, 0.0
        value = resolved + 0.5 * (unc_lo + unc_hi)
        uncertainty = 0.5 * (unc_hi - unc_lo)
        if uncertainty <= rel_tol * max(value, 1e-300) or len(keep) * 2 > max_cells:
            return value, uncertainty
        undecided = []
        for lo, hi in keep:
            k = int(np.argmax(hi - lo))
            mid = 0.5 * (lo[k] + hi[k])
            hi1 = hi.copy()
            hi1[k] = mid
            lo2 = lo.copy()
            lo2[k] = mid
            undecided.append((lo, hi1))
            undecided.append((lo2, hi))
    return resolved, math.inf  # pragma: no cover - loop bound generous


def normalize_phase(
    mu,
    f,
    count: int = 10**6,
    seed: int = 0,
) -> NormalizedPhase:
    """Return (f - m)/s with m = int f dmu and s = int |f - m| dmu.

    Means are exact for boxes, products, and 1-D densities.  The absolute
    moment is exact for 1-D densities, certified by sign-region splitting on
    cubes for total degree <= 2 in dimension <= 3, and Monte Carlo otherwise
    with the standard error recorded.
    """
    if isinstance(mu, PiecewiseDensity1D):
        if not isinstance(f, Polynomial1D):
            if f.n != 1:
                raise ValueError("1-D measure needs a univariate phase")
            f = f.restrict_line([0.0], [1.0])
        if f.degree() == 0:
            raise ValueError("phase is constant on the support")
        m = mu.integral_against(f)
        shifted = f - m
        s = math.fsum(
            integral_abs_poly(piece * shifted, a, b)
            for piece, a, b in zip(mu.pieces, mu.breakpoints, mu.breakpoints[1:])
        )
        if s <= 0:
            raise ValueError("phase is constant on the support")
        poly = (shifted * (1.0 / s)).as_polynomial()
        return NormalizedPhase(poly, m, s, 0.0, "exact1d")

    if f.is_zero or f.degree() == 0:
        raise ValueError("phase is constant on the support")

    if isinstance(mu, UniformBody) and isinstance(mu.body, Box):
        g = f.box_rescale(mu.body.intervals)
        m = g.cube_moment()
        shifted = g - m
        if mu.dim == 1:
            cs: dict[int, float] = {}
            for (e0,), c in shifted.terms.items():
                cs[e0] = cs.get(e0, 0.0) + c
            deg = max(cs) if cs else 0
            p1 = Polynomial1D(tuple(cs.get(j, 0.0) for j in range(deg + 1)))
            s, unc = integral_abs_poly(p1, -0.5, 0.5), 0.0
            method = "certified"
        elif mu.dim == 2 and f.degree() <= 2:
            s, unc = _cube_abs_integral_2d(shifted)
            method = "certified"
        elif mu.dim == 3 and f.degree() <= 2:
            s, unc = _cube_abs_integral_certified(shifted, rel_tol=1e-5, max_cells=60_000)
            method = "certified"
        else:
            pts = sample(mu, count, seed)
            vals = np.abs(f.eval_many(pts) - m)
            s = float(np.mean(vals))
            unc = float(np.std(vals) / math.sqrt(count))
            method = "mc"
        if s <= 0:
            raise ValueError("phase is constant on the support")
        return NormalizedPhase((f - m) * (1.0 / s), m, s, unc, method)

    if isinstance(mu, ProductMeasure):
        m = _product_mean(mu, f)
        pts = sample(mu, count, seed)
        vals = np.abs(f.eval_many(pts) - m)
        s = float(np.mean(vals))
        unc = float(np.std(vals) / math.sqrt(count))
        if s <= 0:
            raise ValueError("phase is constant on the support")
        return NormalizedPhase((f - m) * (1.0 / s), m, s, unc, "mc")

    pts = sample(mu, count, seed)
    vals = f.eval_many(pts)
    m = float(np.mean(vals))
    s = float(np.mean(np.abs(vals - m)))
    unc = float(np.std(np.abs(vals - m)) / math.sqrt(count))
    if s <= 0:
        raise ValueError("phase is constant on the support")
    return NormalizedPhase((f - m) * (1.0 / s), m, s, unc, "mc")


def _product_mean(mu: ProductMeasure, f: Polynomial) -> float:
    """Exact mean of f under a product of exact 1-D densities."""
    total = []
    for e, c in f.terms.items():
        v = c
        for rho_j, ej in zip(mu.factors, e):
            if ej:
                v *= rho_j.integral_against(Polynomial1D((0.0,) * ej + (1.0,)))
        total.append(v)
    return math.fsum(total)


# ---------------------------------------------------------------------------
# decay fitting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecayFit:
    slope: float
    log_constant: float
    window: tuple[float, float]
    r2: float
    n_points: int
    sup_scaled: float | None = None

    @property
    def constant(self) -> float:
        return math.exp(self.log_constant)


def decay_fit(
    pairs: Sequence[tuple[float, float]],
    window: tuple[float, float] | None = None,
    d: int | None = None,
    noise_floor: float = 0.0,
) -> DecayFit:
    """Least-squares fit of log|I| against log t inside the window.

    Points at or below twice the noise floor are trimmed before fitting.
    With ``d`` given, also reports sup over kept points of |I(t)| * t^{1/d}.
    """
    data = [(float(t), float(v)) for t, v in pairs]
    if len(data) < 8:
        raise ValueError("decay fit needs at least 8 pairs")
    if window is None:
        window = (min(t for t, _ in data), max(t for t, _ in data))
    kept = [
        (t, v)
        for t, v in data
        if window[0] <= t <= window[1] and v > 2.0 * noise_floor and v > 0.0
    ]
    if not kept:
        raise ValueError("all values are at or below the noise floor")
    if len(kept) < 8:
        raise ValueError(f"only {len(kept)} usable points inside the window")
    lt = np.log([t for t, _ in kept])
    lv = np.log([v for _, v in kept])
    slope, intercept = np.polyfit(lt, lv, 1)
    pred = slope * lt + intercept
    ss_res = float(np.sum((lv - pred) ** 2))
    ss_tot = float(np.sum((lv - np.mean(lv)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    sup_scaled = None
    if d is not None:
        sup_scaled = max(v * t ** (1.0 / d) for t, v in kept)
    return DecayFit(
        slope=float(slope),
        log_constant=float(intercept),
        window=(float(window[0]), float(window[1])),
        r2=r2,
        n_points=len(kept),
        sup_scaled=sup_scaled,
    )
