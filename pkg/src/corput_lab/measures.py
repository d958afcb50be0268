"""Sampleable multidimensional measures and the directional-derivative check.

Measures are either products of exact 1-D densities or uniform distributions
on convex bodies.  Sampling uses the counter-based Philox generator keyed by
(seed, task index), so parallel sweeps that partition the task space stay
reproducible.  Uniform bodies are sampled by rejection from the bounding box,
which keeps correctness trivial at desk-scale dimensions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from scipy.optimize import linprog

from .density import PiecewiseDensity1D, bv_seminorm

_REJECTION_CHUNK = 1 << 16
_MIN_ACCEPTANCE = 1e-6


def philox_rng(seed: int, task: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by (seed, task index)."""
    return np.random.Generator(np.random.Philox(key=np.uint64(seed) + (np.uint64(task) << 20)))


# ---------------------------------------------------------------------------
# convex bodies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Box:
    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        if not ivs or any(b <= a for a, b in ivs):
            raise ValueError("box needs nonempty intervals with a < b")
        object.__setattr__(self, "intervals", ivs)

    @property
    def dim(self) -> int:
        return len(self.intervals)

    @property
    def bounding_box(self) -> "Box":
        return self

    def volume(self) -> float:
        return math.prod(b - a for a, b in self.intervals)

    def contains(self, pts: np.ndarray) -> np.ndarray:
        lo = np.array([a for a, _ in self.intervals])
        hi = np.array([b for _, b in self.intervals])
        return np.all((pts >= lo) & (pts <= hi), axis=1)

    @staticmethod
    def cube(n: int) -> "Box":
        """Q^n = [-1/2, 1/2]^n."""
        return Box(tuple((-0.5, 0.5) for _ in range(n)))


@dataclass(frozen=True, eq=False)
class Simplex:
    vertices: np.ndarray  # (n+1, n)

    def __post_init__(self) -> None:
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1] + 1:
            raise ValueError("simplex needs n+1 vertices in R^n")
        mat = (v[1:] - v[0]).T
        if abs(np.linalg.det(mat)) < 1e-14:
            raise ValueError("degenerate simplex")
        object.__setattr__(self, "vertices", v)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def bounding_box(self) -> Box:
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return Box(tuple(zip(lo, hi)))

    def volume(self) -> float:
        mat = (self.vertices[1:] - self.vertices[0]).T
        return abs(np.linalg.det(mat)) / math.factorial(self.dim)

    def contains(self, pts: np.ndarray) -> np.ndarray:
        mat = (self.vertices[1:] - self.vertices[0]).T
        bary = np.linalg.solve(mat, (pts - self.vertices[0]).T).T
        tol = 1e-12
        return (bary.min(axis=1) >= -tol) & (bary.sum(axis=1) <= 1 + tol)


@dataclass(frozen=True, eq=False)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self) -> None:
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")
        object.__setattr__(self, "center", c)

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def bounding_box(self) -> Box:
        return Box(tuple((c - self.radius, c + self.radius) for c in self.center))

    def volume(self) -> float:
        n = self.dim
        kappa = math.pi ** (n / 2) / math.gamma(n / 2 + 1)
        return kappa * self.radius**n

    def contains(self, pts: np.ndarray) -> np.ndarray:
        return np.sum((pts - self.center) ** 2, axis=1) <= self.radius**2


@dataclass(frozen=True, eq=False)
class HPolytope:
    """Intersection of halfspaces A x <= b; bounding box found by LP."""

    a_rows: np.ndarray
    offsets: np.ndarray
    _bbox: Box | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        a = np.atleast_2d(np.asarray(self.a_rows, dtype=float))
        b = np.atleast_1d(np.asarray(self.offsets, dtype=float))
        if a.shape[0] != b.size:
            raise ValueError("row count mismatch between A and b")
        object.__setattr__(self, "a_rows", a)
        object.__setattr__(self, "offsets", b)
        # Chebyshev center certifies a nonempty interior.
        norms = np.linalg.norm(a, axis=1)
        res = linprog(
            np.concatenate([np.zeros(a.shape[1]), [-1.0]]),
            A_ub=np.hstack([a, norms[:, None]]),
            b_ub=b,
            bounds=[(None, None)] * a.shape[1] + [(0, None)],
            method="highs",
        )
        if not res.success or res.x[-1] <= 1e-12:
            raise ValueError("polytope has empty interior")
        lo, hi = [], []
        for k in range(a.shape[1]):
            c = np.zeros(a.shape[1])
            c[k] = 1.0
            rmin = linprog(c, A_ub=a, b_ub=b, bounds=(None, None), method="highs")
            rmax = linprog(-c, A_ub=a, b_ub=b, bounds=(None, None), method="highs")
            if not (rmin.success and rmax.success):
                raise ValueError("polytope is unbounded")
            lo.append(rmin.x[k])
            hi.append(rmax.x[k])
        object.__setattr__(self, "_bbox", Box(tuple(zip(lo, hi))))

    @property
    def dim(self) -> int:
        return self.a_rows.shape[1]

    @property
    def bounding_box(self) -> Box:
        return self._bbox

    def volume(self) -> None:
        return None

    def contains(self, pts: np.ndarray) -> np.ndarray:
        return np.all(pts @ self.a_rows.T <= self.offsets + 1e-12, axis=1)


ConvexBody = Union[Box, Simplex, Ball, HPolytope]


# ---------------------------------------------------------------------------
# sampleable measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProductMeasure:
    """Product of 1-D probability densities with an optional concavity tag."""

    factors: tuple[PiecewiseDensity1D, ...]
    s: float | None = None

    def __post_init__(self) -> None:
        for f in self.factors:
            if abs(f.mass - 1.0) > 1e-9:
                raise ValueError("product factors must have mass 1")

    @property
    def dim(self) -> int:
        return len(self.factors)


@dataclass(frozen=True)
class UniformBody:
    """Uniform probability distribution on a convex body; s defaults to 1/n."""

    body: ConvexBody
    s: float | None = None

    def __post_init__(self) -> None:
        if self.s is None:
            object.__setattr__(self, "s", 1.0 / self.body.dim)

    @property
    def dim(self) -> int:
        return self.body.dim


SampleableMeasureND = Union[ProductMeasure, UniformBody]


def _sample_factor(rho: PiecewiseDensity1D, u: np.ndarray) -> np.ndarray:
    """Inverse-CDF transform of uniforms through the exact piecewise CDF."""
    bps = np.asarray(rho.breakpoints)
    cum = np.asarray(rho._cum)
    targets = u * cum[-1]
    idx = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, len(rho.pieces) - 1)
    lo = bps[idx].copy()
    hi = bps[idx + 1].copy()
    rem = targets - cum[idx]
    out = np.empty_like(u)
    for i in np.unique(idx):
        mask = idx == i
        piece = rho.pieces[i]
        anti = piece.antiderivative()
        a = float(bps[i])
        base = anti.eval(a)
        L, H = lo[mask], hi[mask]
        r = rem[mask]
        for _ in range(60):
            midp = 0.5 * (L + H)
            val = anti.eval_many(midp) - base
            high = val > r
            H = np.where(high, midp, H)
            L = np.where(high, L, midp)
        out[mask] = 0.5 * (L + H)
    return out


def sample(mu: SampleableMeasureND, count: int, seed: int, task: int = 0) -> np.ndarray:
    """Deterministic i.i.d. draws from the measure; shape (count, n)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = philox_rng(seed, task)
    if isinstance(mu, ProductMeasure):
        u = rng.random((count, mu.dim))
        cols = [_sample_factor(f, u[:, j]) for j, f in enumerate(mu.factors)]
        return np.column_stack(cols)
    body = mu.body
    bbox = body.bounding_box
    lo = np.array([a for a, _ in bbox.intervals])
    hi = np.array([b for _, b in bbox.intervals])
    if isinstance(body, Box):
        return lo + (hi - lo) * rng.random((count, body.dim))
    out = np.empty((count, body.dim))
    got = 0
    drawn = 0
    while got < count:
        cand = lo + (hi - lo) * rng.random((_REJECTION_CHUNK, body.dim))
        drawn += _REJECTION_CHUNK
        keep = cand[body.contains(cand)]
        take = min(count - got, keep.shape[0])
        out[got : got + take] = keep[:take]
        got += take
        if drawn >= 10_000_000 and got / drawn < _MIN_ACCEPTANCE:
            raise RuntimeError(
                f"rejection acceptance {got / drawn:.2e} below {_MIN_ACCEPTANCE}"
            )
    return out


def rejection_acceptance(mu: UniformBody, count: int, seed: int) -> float:
    """Observed acceptance rate of the rejection sampler (diagnostics)."""
    rng = philox_rng(seed)
    body = mu.body
    bbox = body.bounding_box
    lo = np.array([a for a, _ in bbox.intervals])
    hi = np.array([b for _, b in bbox.intervals])
    cand = lo + (hi - lo) * rng.random((count, body.dim))
    return float(np.mean(body.contains(cand)))


# ---------------------------------------------------------------------------
# Krug's directional-derivative formula
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Density2D:
    """2-D density given by a vectorized callable on (N, 2) points with a box."""

    fn: Callable[[np.ndarray], np.ndarray]
    bbox: tuple[tuple[float, float], tuple[float, float]]

    @staticmethod
    def uniform_disk() -> "Density2D":
        def fn(xy: np.ndarray) -> np.ndarray:
            return np.where(xy[:, 0] ** 2 + xy[:, 1] ** 2 <= 1.0, 1.0 / math.pi, 0.0)

        return Density2D(fn, ((-1.0, 1.0), (-1.0, 1.0)))

    @staticmethod
    def uniform_square() -> "Density2D":
        def fn(xy: np.ndarray) -> np.ndarray:
            inside = (np.abs(xy[:, 0]) <= 0.5) & (np.abs(xy[:, 1]) <= 0.5)
            return np.where(inside, 1.0, 0.0)

        return Density2D(fn, ((-0.5, 0.5), (-0.5, 0.5)))

    @staticmethod
    def product(f1: PiecewiseDensity1D, f2: PiecewiseDensity1D) -> "Density2D":
        def fn(xy: np.ndarray) -> np.ndarray:
            return f1.eval_many(xy[:, 0]) * f2.eval_many(xy[:, 1])

        return Density2D(fn, (f1.support, f2.support))


@dataclass(frozen=True)
class KrugCheck:
    tv_lhs: float
    krug_rhs: float
    log_concave_ok: bool


def _log_concavity_spot_check_1d(rho: PiecewiseDensity1D, seed: int = 7) -> bool:
    rng = philox_rng(seed)
    a, b = rho.support
    x = rng.uniform(a, b, 256)
    y = rng.uniform(a, b, 256)
    fx, fy = rho.eval_many(x), rho.eval_many(y)
    fm = rho.eval_many(0.5 * (x + y))
    mask = (fx > 0) & (fy > 0)
    return bool(np.all(fm[mask] ** 2 >= fx[mask] * fy[mask] * (1 - 1e-9)))


def _log_concavity_spot_check_2d(rho: Density2D, seed: int = 7) -> bool:
    rng = philox_rng(seed)
    (x0, x1), (y0, y1) = rho.bbox
    p = np.column_stack([rng.uniform(x0, x1, 512), rng.uniform(y0, y1, 512)])
    q = np.column_stack([rng.uniform(x0, x1, 512), rng.uniform(y0, y1, 512)])
    fp, fq = rho.fn(p), rho.fn(q)
    fm = rho.fn(0.5 * (p + q))
    mask = (fp > 0) & (fq > 0)
    return bool(np.all(fm[mask] ** 2 >= fp[mask] * fq[mask] * (1 - 1e-9)))


def krug_check(
    rho: PiecewiseDensity1D | Density2D,
    theta: Sequence[float] | float = 1.0,
    grid: int = 2001,
) -> KrugCheck:
    """Compare the directional-derivative TV with 2 * integral of line suprema.

    1-D inputs are handled exactly; 2-D inputs are evaluated on a rotated
    tensor grid, with the TV along theta summed line by line.
    """
    if isinstance(rho, PiecewiseDensity1D):
        tv = bv_seminorm(rho)
        rhs = 2.0 * rho.sup_norm
        return KrugCheck(tv, rhs, _log_concavity_spot_check_1d(rho))

    theta = np.asarray(theta, dtype=float)
    if theta.shape != (2,):
        raise ValueError("2-D check needs a direction in R^2")
    norm = float(np.linalg.norm(theta))
    if abs(norm - 1.0) > 1e-12:
        raise ValueError("direction must be a unit vector")
    perp = np.array([-theta[1], theta[0]])
    corners = np.array(
        [(x, y) for x in rho.bbox[0] for y in rho.bbox[1]], dtype=float
    )
    t_proj = corners @ theta
    y_proj = corners @ perp
    pad = 2.0 * max(np.ptp(t_proj), np.ptp(y_proj)) / grid
    ts = np.linspace(t_proj.min() - pad, t_proj.max() + pad, grid)
    ys = np.linspace(y_proj.min() - pad, y_proj.max() + pad, grid)
    hy = ys[1] - ys[0]
    tv = 0.0
    rhs = 0.0
    pts = np.empty((grid, 2))
    for y in ys:
        pts[:, 0] = y * perp[0] + ts * theta[0]
        pts[:, 1] = y * perp[1] + ts * theta[1]
        line = rho.fn(pts)
        tv += float(np.sum(np.abs(np.diff(line)))) * hy
        rhs += 2.0 * float(np.max(line)) * hy
    return KrugCheck(tv, rhs, _log_concavity_spot_check_2d(rho))


# ---------------------------------------------------------------------------
# JSON measure configuration
# ---------------------------------------------------------------------------


def measure_to_config(mu: SampleableMeasureND) -> dict:
    from .density import density_to_literal

    if isinstance(mu, ProductMeasure):
        return {
            "type": "product",
            "factors": [density_to_literal(f) for f in mu.factors],
            "s": mu.s,
        }
    body = mu.body
    if isinstance(body, Box):
        return {"type": "box", "intervals": [list(iv) for iv in body.intervals], "s": mu.s, "volume": body.volume()}
    if isinstance(body, Simplex):
        return {"type": "simplex", "vertices": body.vertices.tolist(), "s": mu.s, "volume": body.volume()}
    if isinstance(body, Ball):
        return {"type": "ball", "center": body.center.tolist(), "radius": body.radius, "s": mu.s, "volume": body.volume()}
    return {"type": "hpolytope", "a": body.a_rows.tolist(), "b": body.offsets.tolist(), "s": mu.s}


def measure_from_config(cfg: dict) -> SampleableMeasureND:
    from .density import density_from_literal

    cfg = dict(cfg)
    kind = cfg.pop("type", None)
    cfg.pop("volume", None)
    s = cfg.pop("s", None)
    known = {
        "product": {"factors"},
        "box": {"intervals"},
        "cube": {"n"},
        "simplex": {"vertices"},
        "ball": {"center", "radius"},
        "hpolytope": {"a", "b"},
    }
    if kind not in known:
        raise ValueError(f"unknown measure type {kind!r}")
    extra = set(cfg) - known[kind]
    if extra:
        raise ValueError(f"unknown measure fields {sorted(extra)}")
    if kind == "product":
        factors = tuple(density_from_literal(f) for f in cfg["factors"])
        return ProductMeasure(factors, s)
    if kind == "box":
        return UniformBody(Box(tuple(tuple(iv) for iv in cfg["intervals"])), s)
    if kind == "cube":
        return UniformBody(Box.cube(int(cfg["n"])), s)
    if kind == "simplex":
        return UniformBody(Simplex(np.asarray(cfg["vertices"], dtype=float)), s)
    if kind == "ball":
        return UniformBody(Ball(np.asarray(cfg["center"], dtype=float), float(cfg["radius"])), s)
    return UniformBody(HPolytope(np.asarray(cfg["a"], dtype=float), np.asarray(cfg["b"], dtype=float)), s)
