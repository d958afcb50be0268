"""Configuration-driven inequality suites with machine-readable reports.

Each suite checks one of the quantitative statements the package computes:
sandwich equivalence of the two moduli, set-measure bounds, explicit
sublevel and separation constants, the directional-derivative identity,
mixture reconstruction, pushforward regularity exponents with dimension
stability, oscillatory decay, the logarithmic individual-degree regime,
and the distance-interpolation exponent.  Reports are reproducible
byte-for-byte for a fixed configuration.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
import platform
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import __version__
from .density import (
    GridMeasure1D,
    PiecewiseDensity1D,
    bv_seminorm,
    density_sub,
    merge_intervals,
    mixture_decompose,
    omega,
    shift_l1,
    sigma,
)
from .measures import (
    Box,
    Density2D,
    ProductMeasure,
    UniformBody,
    krug_check,
    philox_rng,
    sample,
)
from .oscint import MC_NOISE_FLOOR_FACTOR, normalize_phase, osc_sweep
from .poly import Polynomial, Polynomial1D
from .pushforward import pushforward_cdf_1d
from .sublevel import quantile_points, sublevel_measure_1d

class ConfigError(ValueError):
    """Raised for malformed experiment configurations."""


# ---------------------------------------------------------------------------
# seeded generators shared by suites and tests
# ---------------------------------------------------------------------------


def random_step_density(
    rng: np.random.Generator, max_pieces: int = 10, span: tuple[float, float] = (0.0, 1.0)
) -> PiecewiseDensity1D:
    """Normalized random step density with well-separated breakpoints."""
    k = int(rng.integers(2, max_pieces + 1))
    lo, hi = span
    while True:
        bps = np.sort(rng.uniform(lo, hi, k + 1))
        if np.min(np.diff(bps)) > 1e-3 * (hi - lo):
            break
    vals = rng.uniform(0.05, 1.0, k)
    return PiecewiseDensity1D.step(bps, vals).normalized()


def random_interval_union(
    rng: np.random.Generator,
    lo: float = -0.1,
    hi: float = 1.1,
    max_parts: int = 3,
    min_total: float = 0.05,
) -> tuple[tuple[float, float], ...]:
    """Random union of intervals with total length at least ``min_total``."""
    while True:
        parts = []
        for _ in range(int(rng.integers(1, max_parts + 1))):
            a, b = np.sort(rng.uniform(lo, hi, 2))
            if b > a:
                parts.append((float(a), float(b)))
        merged = merge_intervals(parts)
        if merged and sum(b - a for a, b in merged) >= min_total:
            return merged


def random_polynomial(
    rng: np.random.Generator, n: int, d: int, unit_variance: bool = True
) -> Polynomial:
    """Dense random polynomial: i.i.d. uniform [-1, 1] coefficients over
    0 < |j| <= d, resampled until the top-degree mass is nontrivial,
    then optionally rescaled to unit cube variance."""
    exps = [
        e
        for e in itertools.product(*(range(d + 1) for _ in range(n)))
        if 0 < sum(e) <= d
    ]
    while True:
        terms = {e: float(rng.uniform(-1.0, 1.0)) for e in exps}
        f = Polynomial(n, terms)
        if f.leading_data()[1] >= 0.1:
            break
    if unit_variance:
        f = f * (1.0 / math.sqrt(f.cube_variance()))
    return f


def sum_power_phase(n: int, k: int, d: int) -> Polynomial:
    """(x_1 + ... + x_k)^d on R^n, rescaled to unit cube variance.

    These carry the fold/cusp singularities that make the regularity bounds
    tight, and embedding the same phase at every n >= k anchors the fitted
    constants for the dimension-stability checks.
    """
    if k > n:
        raise ValueError("anchor needs k <= n")
    base = Polynomial.zero(n)
    for j in range(k):
        base = base + Polynomial.coordinate(n, j)
    f = Polynomial.constant(n, 1.0)
    for _ in range(d):
        f = f * base
    return f * (1.0 / math.sqrt(f.cube_variance()))


# ---------------------------------------------------------------------------
# sigma of a Monte Carlo sample (split-half noise correction)
# ---------------------------------------------------------------------------


def sigma_from_samples(
    vals: np.ndarray, eps: float, certify: bool = True, clip_quantile: float = 1e-6
) -> float:
    """sigma of an empirical pushforward at bin width eps/10.

    The raw LP value on an empirical histogram inflates at small eps because
    the test function harvests sampling noise.  The histogram of the
    half-sample difference carries the same noise covariance and no signal,
    so its sigma is subtracted as an empirical noise budget (clamped at 0).
    """
    lo = float(np.quantile(vals, clip_quantile))
    hi = float(np.quantile(vals, 1.0 - clip_quantile))
    if hi <= lo:
        raise ValueError("degenerate sample range")
    count = vals.size
    nbins = int(math.ceil((hi - lo) / (eps / 10.0)))
    counts, _ = np.histogram(vals, bins=nbins, range=(lo, hi))
    h = (hi - lo) / nbins
    full = GridMeasure1D(lo, h, counts / count)
    ca, _ = np.histogram(vals[0::2], bins=nbins, range=(lo, hi))
    cb, _ = np.histogram(vals[1::2], bins=nbins, range=(lo, hi))
    noise = GridMeasure1D(lo, h, (ca - cb) / count)
    s_full = sigma(full, eps, certify=certify)
    s_noise = sigma(noise, eps, certify=certify)
    return max(s_full - s_noise, 0.0)


def fit_constant(samples: Sequence[tuple[float, float]]) -> tuple[float, int]:
    """Max of lhs/shape over the samples plus the index of the maximizer."""
    if not samples:
        raise ValueError("fit_constant needs at least one sample")
    best = -math.inf
    best_idx = -1
    for i, (lhs, shape) in enumerate(samples):
        if not shape > 0:
            raise ValueError(f"shape at index {i} is not positive")
        r = lhs / shape
        if r > best:
            best = r
            best_idx = i
    return best, best_idx


# ---------------------------------------------------------------------------
# configuration and report containers
# ---------------------------------------------------------------------------

_TOP_KEYS = {"schema", "suite", "seed", "params"}


@dataclass(frozen=True)
class ExperimentConfig:
    suite: str
    seed: int = 0
    params: dict = field(default_factory=dict)
    schema: int = 1

    @staticmethod
    def from_dict(raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        extra = set(raw) - _TOP_KEYS
        if extra:
            raise ConfigError(f"unknown config fields {sorted(extra)}")
        if raw.get("schema", 1) != 1:
            raise ConfigError(f"unsupported schema {raw.get('schema')!r}")
        suite = raw.get("suite")
        if suite not in SUITES:
            raise ConfigError(f"unknown suite {suite!r}; known: {sorted(SUITES)}")
        seed = raw.get("seed", 0)
        if not isinstance(seed, int):
            raise ConfigError("seed must be an integer")
        params = raw.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError("params must be an object")
        allowed = SUITE_PARAMS[suite]
        extra = set(params) - set(allowed)
        if extra:
            raise ConfigError(f"unknown params for {suite}: {sorted(extra)}")
        merged = dict(allowed)
        merged.update(params)
        return ExperimentConfig(suite=suite, seed=seed, params=merged)


@dataclass
class InequalityReport:
    suite: str
    cases: list[dict]
    verdict: str
    constants: dict
    seed: int
    version: dict

    def to_json_bytes(self) -> bytes:
        obj = {
            "suite": self.suite,
            "cases": self.cases,
            "verdict": self.verdict,
            "constants": self.constants,
            "seed": self.seed,
            "version": self.version,
        }
        return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()

    def cases_csv(self) -> str:
        if not self.cases:
            return ""
        cols = sorted({k for case in self.cases for k in case})
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(cols)
        for case in self.cases:
            writer.writerow([case.get(c, "") for c in cols])
        return buf.getvalue()

    def write(self, out_dir: str | Path) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_bytes(self.to_json_bytes())
        (out / "cases.csv").write_text(self.cases_csv())

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def _version_block() -> dict:
    return {
        "schema": 1,
        "package": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
    }


def _workers() -> int:
    env = os.environ.get("CORPUT_LAB_THREADS", "")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def _parallel_map(fn: Callable[[int], dict], indices: Iterable[int]) -> list[dict]:
    """Run cases in parallel, reduce in case-index order."""
    idx = list(indices)
    n_workers = _workers()
    if n_workers <= 1:
        return [fn(i) for i in idx]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        results = list(pool.map(fn, idx))
    return results


def _geom_grid(spec: dict) -> np.ndarray:
    return np.geomspace(float(spec["min"]), float(spec["max"]), int(spec["points"]))


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------


def _suite_t_equiv(cfg: ExperimentConfig) -> tuple[list[dict], dict, bool]:
    p = cfg.params
    slack = float(p["grid_slack"])

    def one(i: int) -> dict:
        rng = philox_rng(cfg.seed, i)
        rho = random_step_density(rng, p["max_pieces"])
        rows = []
        for eps in p["eps"]:
            w = omega(rho, eps)
            grid = GridMeasure1D.from_density(rho, eps / 64.0)
            s = sigma(grid, eps)
            ok = 0.5 * w * (1.0 - slack) <= s <= 6.0 * w * (1.0 + slack)
            rows.append({"case": i, "eps": eps, "omega": w, "sigma": s, "pass": ok})
        return {"rows": rows}

    results = _parallel_map(one, range(int(p["cases"])))
    cases = [row for r in results for row in r["rows"]]
    ratios = [c["sigma"] / c["omega"] for c in cases if c["omega"] > 0]
    constants = {"ratio_min": min(ratios), "ratio_max": max(ratios)}
    return cases, constants, all(c["pass"] for c in cases)


def _suite_t_meas(cfg: ExperimentConfig) -> tuple[list[dict], dict, bool]:
    p = cfg.params
    tol = float(p["tolerance"])

    def one(i: int) -> dict:
        rng = philox_rng(cfg.seed, i)
        rho = random_step_density(rng, p["max_pieces"])
        a_set = random_interval_union(rng, min_total=float(p["min_length"]))
        lam = sum(b - a for a, b in a_set)
        nu_a = rho.integral_over(a_set)
        grid = GridMeasure1D.from_density(rho, lam / 128.0)
        s = sigma(grid, lam)
        return {
            "case": i,
            "lambda": lam,
            "nu_A": nu_a,
            "sigma": s,
            "pass": nu_a <= s + tol,
        }

    cases = _parallel_map(one, range(int(p["cases"])))
    gaps = [c["sigma"] + tol - c["nu_A"] for c in cases]
    return cases, {"min_gap": min(gaps)}, all(c["pass"] for c in cases)


def _suite_sublevel_8ek(cfg: ExperimentConfig) -> tuple[list[dict], dict, bool]:
    p = cfg.params
    eps_grid = _geom_grid(p["eps_grid"])

    def one(i: int) -> dict:
        rng = philox_rng(cfg.seed, i)
        k = int(rng.choice(p["ks"]))
        lead = 1.0 / math.factorial(k)
        lower = rng.uniform(-1.0, 1.0, k) * lead
        f = Polynomial1D(tuple(lower) + (lead,))
        rho = random_step_density(rng, p["max_pieces"], span=(-1.0, 1.0))
        sup = rho.sup_norm
        worst = -math.inf
        ok = True
        for eps in eps_grid:
            lhs = sublevel_measure_1d(rho, f, float(eps))
            rhs = 8.0 * math.e * k * sup * eps ** (1.0 / k)
            worst = max(worst, lhs / rhs)
            ok = ok and lhs <= rhs
        return {"case": i, "k": k, "sup_norm": sup, "max_ratio": worst, "pass": ok}

    cases = _parallel_map(one, range(int(p["cases"])))
    return (
        cases,
        {"max_ratio": max(c["max_ratio"] for c in cases)},
        all(c["pass"] for c in cases),
    )


def _suite_quantile_4e(cfg: ExperimentConfig) -> tuple[list[dict], dict, bool]:
    p = cfg.params

    def one(i: int) -> dict:
        rng = philox_rng(cfg.seed, i)
        rho = random_step_density(rng, p["max_pieces"])
        k = int(rng.integers(1, int(p["k_max"]) + 1))
        while True:
            e_set = random_interval_union(rng, lo=-0.05, hi=1.05, min_total=0.02)
            if rho.integral_over(e_set) > 1e-6:
                break
        rep = quantile_points(rho, e_set, k)
        return {
            "case": i,
            "k": k,
            "measure_E": rep.measure_e,
            "min_product": rep.min_product,
            "threshold": rep.threshold,
            "pass": rep.min_product >= rep.threshold,
        }

    cases = _parallel_map(one, range(int(p["cases"])))
    margins = [c["min_product"] / c["threshold"] for c in cases]
    return cases, {"min_margin": min(margins)}, all(c["pass"] for c in cases)


def _krug_fixture() -> list[tuple[str, object, object]]:
    bump = PiecewiseDensity1D((0.0, 1.0), (Polynomial1D((0.0, 6.0, -6.0)),))
    trapezoid = PiecewiseDensity1D(
        (0.0, 0.5, 1.5, 2.0),
        (
            Polynomial1D((0.0, 4.0 / 3.0)),
            Polynomial1D((2.0 / 3.0,)),
            Polynomial1D((8.0 / 3.0, -4.0 / 3.0)),
        ),
    )
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    return [
        ("uniform_unit", PiecewiseDensity1D.uniform(0.0, 1.0), 1.0),
        ("tent", PiecewiseDensity1D.tent(0.0, 2.0), 1.0),
        ("parabolic_bump", bump, 1.0),
        ("trapezoid", trapezoid, 1.0),
        ("disk_e1", Density2D.uniform_disk(), (1.0, 0.0)),
        ("square_diag", Density2D.uniform_square(), (inv_sqrt2, inv_sqrt2)),
    ]


def _suite_krug(cfg: ExperimentConfig) -> tuple[list[dict], dict, bool]:
    p = cfg.params
    cases = []
    for name, rho, theta in _krug_fixture():
        is_1d = isinstance(rho, PiecewiseDensity1D)
        chk = krug_check(rho, theta, grid=int(p["grid"]))
        if is_1d:
            ok = abs(chk.tv_lhs - chk.krug_rhs) <= float(p["tol_1d"])
        else:
            ok = abs(chk.tv_lhs - chk.krug_rhs) <= float(p["tol_2d"]) * chk.krug_rhs
        cases.append(
            {
                "case": name,
                "tv_lhs": chk.tv_lhs,
                "krug_rhs": chk.krug_rhs,
                "log_concave_ok": chk.log_concave_ok,
                "pass": ok and chk.log_concave_ok,
            }
        )
    worst = max(abs(c["tv_lhs"] - c["krug_rhs"]) / c["krug_rhs"] for c in cases)
    return cases, {"max_rel_gap": worst}, all(c["pass"] for c in cases)


def _suite_mixture(cfg: ExperimentConfig) -> tuple[list[dict], dict, bool]:
    p = cfg.params
    tol = float(p["tol"])

    def one(i: int) -> dict:
        rng = philox_rng(cfg.seed, i)
        rho = random_step_density(rng, p["max_pieces"])
        mix = mixture_decompose(rho)
        l1 = density_sub(mix.reconstruct(), rho).abs_integral()
        tv = bv_seminorm(rho)
        tv_err = abs(mix.tv_total() - tv) / tv
        return {
            "case": i,
            "components": len(mix.components),
            "l1_error": l1,
            "tv_rel_error": tv_err,
            "pass": l1 <= tol and tv_err <= tol,
        }

    cases = _parallel_map(one, range(int(p["cases"])))
    return (
        cases,
        {
            "max_l1": max(c["l1_error"] for c in cases),
            "max_tv_rel": max(c["tv_rel_error"] for c in cases),
        },
        all(c["pass"] for c in cases),
    )


def _main_reg_members(n: int, d: int, n_random: int, seed: int) -> list[tuple[str, Polynomial]]:
    members = [(f"anchor_k{k}", sum_power_phase(n, k, d)) for k in range(1, min(d, n) + 1)]
    rng = philox_rng(seed, 900 + 10 * n + d)
    for j in range(n_random):
        members.append((f"random_{j}", random_polynomial(rng, n, d)))
    return members


def _suite_main_reg(cfg: ExperimentConfig) -> tuple[list[dict], dict, bool]:
    p = cfg.params
    eps_grid = _geom_grid(p["eps_grid"])
    count = int(p["mc_count"])
    slope_margin = float(p["slope_margin"])
    stability = float(p["stability_factor"])
    cases = []
    anchor_norm: dict[int, dict[int, float]] = {}
    all_pass = True
    for d in p["ds"]:
        anchor_norm[d] = {}
        for n in p["ns"]:
            pts = sample(UniformBody(Box.cube(n)), count, seed=cfg.seed, task=10 * n + d)
            best_anchor = -math.inf
            for name, f in _main_reg_members(n, d, int(p["random_members"]), cfg.seed):
                vals = f.eval_many(pts)
                sig = [max(sigma_from_samples(vals, float(e)), 1e-12) for e in eps_grid]
                slope = float(np.polyfit(np.log(eps_grid), np.log(sig), 1)[0])
                chat, _ = fit_constant([(s, float(e) ** (1.0 / d)) for s, e in zip(sig, eps_grid)])
                var = f.cube_variance()
                norm_c = chat * var ** (1.0 / (2 * d)) / min(d, n)
                slope_ok = slope >= 1.0 / d - slope_margin
                all_pass = all_pass and slope_ok
                if name.startswith("anchor"):
                    best_anchor = max(best_anchor, norm_c)
                cases.append(
                    {
                        "n": n,
                        "d": d,
                        "member": name,
                        "slope": slope,
                        "slope_min": 1.0 / d - slope_margin,
                        "c_hat": chat,
                        "norm_const": norm_c,
                        "pass": slope_ok,
                    }
                )
            anchor_norm[d][n] = best_anchor
    constants = {}
    for d in p["ds"]:
        vals = list(anchor_norm[d].values())
        spread = max(vals) / min(vals)
        constants[f"d{d}_norm_consts"] = {str(n): v for n, v in anchor_norm[d].items()}
        constants[f"d{d}_stability"] = spread
        all_pass = all_pass and spread <= stability
    return cases, constants, all_pass


def _suite_osc_decay(cfg: ExperimentConfig) -> tuple[list[dict], dict, bool]:
    p = cfg.params
    ts = _geom_grid(p["t_grid"])
    count = int(p["mc_count"])
    floor = MC_NOISE_FLOOR_FACTOR / math.sqrt(count)
    stability = float(p["stability_factor"])
    cases = []
    chat_by: dict[int, dict[int, float]] = {}
    for d in p["ds"]:
        chat_by[d] = {}
        for n in p["ns"]:
            mu = UniformBody(Box.cube(n))
            best = -math.inf
            for name, f in _main_reg_members(n, d, int(p["random_members"]), cfg.seed):
                nf = normalize_phase(mu, f, count=count, seed=cfg.seed + 3)
                sweep = osc_sweep(mu, nf.poly, ts, method="mc", count=count, seed=cfg.seed + 4)
                kept = [(v.t, abs(v.value)) for v in sweep if abs(v.value) > 2.0 * floor]
                sup = max((a * t ** (1.0 / d) for t, a in kept), default=float("nan"))
                if kept and name.startswith("anchor"):
                    best = max(best, sup / min(d, n))
                cases.append(
                    {
                        "n": n,
                        "d": d,
                        "member": name,
                        "normalize_method": nf.method,
                        "normalize_err": nf.abs_moment_error,
                        "kept_points": len(kept),
                        "sup_scaled": sup,
                        "pass": bool(kept) if name.startswith("anchor") else True,
                    }
                )
            chat_by[d][n] = best
    constants = {}
    ok = all(c["pass"] for c in cases)
    for d in p["ds"]:
        vals = list(chat_by[d].values())
        spread = max(vals) / min(vals)
        constants[f"d{d}_c_hats"] = {str(n): v for n, v in chat_by[d].items()}
        constants[f"d{d}_stability"] = spread
        ok = ok and spread <= stability
        chat = max(vals)
        for c in cases:
            if c["d"] == d and np.isfinite(c["sup_scaled"]):
                bound_ok = c["sup_scaled"] <= chat * min(d, c["n"]) * (1.0 + 1e-9)
                c["pass"] = bool(c["pass"] and bound_ok)
                ok = ok and bound_ok
    return cases, constants, ok


def _suite_coeff_t1(cfg: ExperimentConfig) -> tuple[list[dict], dict, bool]:
    p = cfg.params
    eps_grid = _geom_grid(p["eps_grid"])
    count = int(p["mc_count"])
    d = int(p["d"])
    cases = []
    ok = True
    for n in p["ns"]:
        for j in range(int(p["cases"])):
            rng = philox_rng(cfg.seed, 100 * n + j)
            factors = tuple(random_step_density(rng, 6) for _ in range(n))
            mu = ProductMeasure(factors)
            f = random_polynomial(rng, n, d, unit_variance=False)
            _, l2top, _ = f.leading_data()
            max_bv = max(bv_seminorm(r) for r in factors)
            pts = sample(mu, count, seed=cfg.seed, task=500 + 10 * n + j)
            vals = f.eval_many(pts)
            sig = [max(sigma_from_samples(vals, float(e)), 1e-12) for e in eps_grid]
            slope = float(np.polyfit(np.log(eps_grid), np.log(sig), 1)[0])
            shape = [
                min(d, n) * (1.0 + max_bv) * l2top ** (-1.0 / d) * float(e) ** (1.0 / d)
                for e in eps_grid
            ]
            chat, _ = fit_constant(list(zip(sig, shape)))
            slope_ok = slope >= 1.0 / d - float(p["slope_margin"])
            ok = ok and slope_ok
            cases.append(
                {
                    "n": n,
                    "case": j,
                    "f2": l2top,
                    "max_bv": max_bv,
                    "slope": slope,
                    "c_hat": chat,
                    "pass": slope_ok,
                }
            )
    return cases, {"c_hat_max": max(c["c_hat"] for c in cases)}, ok


def _suite_ind_deg(cfg: ExperimentConfig) -> tuple[list[dict], dict, bool]:
    p = cfg.params
    eps_grid = _geom_grid(p["eps_grid"])
    cases = []
    constants = {}
    ok = True
    for d in p["ds"]:
        rho = product_uniform_image_density(d)
        # the density is decreasing, so the shift distance is nondecreasing
        # in h and omega(rho, eps) = shift_l1(rho, eps); spot-check that with
        # the full grid search at one midsize eps
        mid_eps = float(eps_grid[len(eps_grid) // 2])
        w_grid = omega(rho, mid_eps, grid=64)
        if abs(w_grid - shift_l1(rho, mid_eps)) > 1e-6 * w_grid:
            raise AssertionError("shift distance is not maximal at h = eps")
        w_vals = [shift_l1(rho, float(eps)) for eps in eps_grid]
        oracle = [2.0 * _product_cdf_closed_form(float(e), d) for e in eps_grid]
        oracle_err = max(abs(w - o) / o for w, o in zip(w_vals, oracle))
        x = (np.log(1.0 / eps_grid)) ** (d - 1)
        y = np.array(w_vals) / eps_grid
        slope, intercept = np.polyfit(x, y, 1)
        pred = slope * x + intercept
        r2 = 1.0 - float(np.sum((y - pred) ** 2)) / float(np.sum((y - np.mean(y)) ** 2))
        good = r2 >= float(p["r2_min"]) and oracle_err <= float(p["oracle_rel_tol"])
        ok = ok and good
        constants[f"d{d}_r2"] = r2
        constants[f"d{d}_slope"] = float(slope)
        constants[f"d{d}_factorial_inv"] = 1.0 / math.factorial(d - 1)
        cases.append(
            {
                "d": d,
                "r2": r2,
                "fit_slope": float(slope),
                "oracle_rel_err": oracle_err,
                "pass": good,
            }
        )
    return cases, constants, ok


def _product_cdf_closed_form(s: float, d: int) -> float:
    """CDF of a product of d independent U[0,1] variables."""
    if d == 2:
        return s * (1.0 - math.log(s))
    if d == 3:
        return s * (math.log(s) ** 2 - 2.0 * math.log(s) + 2.0) / 2.0
    raise ValueError("closed form implemented for d in {2, 3}")


def product_uniform_image_density(
    d: int, cutoff: float = 1e-11, cheb_degree: int = 6
) -> PiecewiseDensity1D:
    """Piecewise-polynomial approximant of (-ln s)^{d-1}/(d-1)! on (0, 1].

    Dyadic blocks with Chebyshev interpolants; the truncated tail below
    ``cutoff`` carries less than 1e-8 of the mass for d <= 3.
    """
    fac = math.factorial(d - 1)

    def fn(s: np.ndarray) -> np.ndarray:
        return (-np.log(s)) ** (d - 1) / fac

    levels = int(math.ceil(-math.log2(cutoff)))
    bps = [cutoff] + [2.0**-k for k in range(levels, 0, -1)] + [1.0]
    bps = sorted(set(bps))
    return PiecewiseDensity1D.from_function(fn, bps, degree=cheb_degree)


def _suite_coeff_t2(cfg: ExperimentConfig) -> tuple[list[dict], dict, bool]:
    p = cfg.params
    eps_grid = _geom_grid(p["eps_grid"])
    count = int(p["mc_count"])
    cases = []
    ok = True
    for spec in p["phases"]:
        n, d, m = int(spec["n"]), int(spec["d"]), int(spec["m"])
        f = Polynomial.from_text(spec["f"], n=n)
        _, _, linf = f.leading_data()
        mu = UniformBody(Box.cube(n))
        pts = sample(mu, count, seed=cfg.seed, task=700 + n)
        vals = f.eval_many(pts)
        sig = [max(sigma_from_samples(vals, float(e)), 1e-12) for e in eps_grid]
        shape = [
            linf ** (-1.0 / m)
            * float(e) ** (1.0 / m)
            * (abs(math.log(float(e) / linf)) ** (d - m) + 1.0)
            for e in eps_grid
        ]
        ratios = [s / sh for s, sh in zip(sig, shape)]
        chat, _ = fit_constant(list(zip(sig, shape)))
        spread = max(ratios) / max(min(ratios), 1e-12)
        good = spread <= float(p["ratio_spread_max"])
        ok = ok and good
        cases.append(
            {
                "f": spec["f"],
                "n": n,
                "d": d,
                "m": m,
                "c_hat": chat,
                "ratio_spread": spread,
                "pass": good,
            }
        )
    return cases, {"c_hat_max": max(c["c_hat"] for c in cases)}, ok


def tv_k_distances(delta: float, grid: int = 50001) -> tuple[float, float]:
    """Exact-CDF distances between (U + delta U^2) and U on Q^1.

    d_tv sums absolute cell-mass differences on a fine grid (exact CDFs);
    d_k is the trapezoid integral of the absolute CDF difference.
    """
    u = PiecewiseDensity1D.uniform(-0.5, 0.5)
    f = Polynomial1D((0.0, 1.0, delta))
    lo = -0.5 - 0.01
    hi = 0.5 + delta / 4.0 + 0.01
    s = np.linspace(lo, hi, grid)
    f_cdf = np.array([pushforward_cdf_1d(u, f, float(x)) for x in s])
    g_cdf = np.clip(s + 0.5, 0.0, 1.0)
    d_k = float(np.trapezoid(np.abs(f_cdf - g_cdf), s))
    d_tv = float(np.sum(np.abs(np.diff(f_cdf) - np.diff(g_cdf))))
    return d_tv, d_k


def _suite_tv_k(cfg: ExperimentConfig) -> tuple[list[dict], dict, bool]:
    p = cfg.params
    deltas = [float(x) for x in p["deltas"]]
    d = int(p["d"])
    alpha = 1.0 / d
    expo = alpha / (1.0 + alpha)
    tol = float(p["tolerance"])
    rows = []
    for dl in sorted(deltas):
        tv, dk = tv_k_distances(dl, int(p["grid"]))
        rows.append((dl, tv, dk, tv / dk**expo))
    c_hat = rows[0][3]
    cases = []
    ok = True
    for dl, tv, dk, ratio in rows:
        good = tv <= (1.0 + tol) * c_hat * dk**expo
        ok = ok and good
        cases.append(
            {
                "delta": dl,
                "d_tv": tv,
                "d_k": dk,
                "ratio": ratio,
                "bound": (1.0 + tol) * c_hat * dk**expo,
                "pass": good,
            }
        )
    constants = {"c_hat": c_hat, "exponent": expo, "ratio_max": rows[-1][3]}
    return cases, constants, ok


SUITE_PARAMS: dict[str, dict] = {
    "t_equiv": {"cases": 200, "eps": [0.01, 0.1, 0.5], "grid_slack": 0.05, "max_pieces": 10},
    "t_meas": {"cases": 100, "tolerance": 1e-3, "max_pieces": 10, "min_length": 0.05},
    "sublevel_8ek": {
        "cases": 50,
        "ks": [2, 3, 4],
        "eps_grid": {"min": 1e-4, "max": 1e-1, "points": 13},
        "max_pieces": 8,
    },
    "quantile_4e": {"cases": 100, "k_max": 4, "max_pieces": 8},
    "krug": {"grid": 2001, "tol_1d": 1e-9, "tol_2d": 0.01},
    "mixture": {"cases": 100, "tol": 1e-12, "max_pieces": 12},
    "main_reg": {
        "ns": [1, 2, 3, 5, 8],
        "ds": [2, 3],
        "mc_count": 1_000_000,
        "eps_grid": {"min": 1e-3, "max": 1e-1, "points": 9},
        "random_members": 1,
        "stability_factor": 3.0,
        "slope_margin": 0.1,
    },
    "osc_decay": {
        "ns": [2, 4],
        "ds": [2, 3],
        "mc_count": 1_000_000,
        "t_grid": {"min": 10.0, "max": 300.0, "points": 12},
        "random_members": 1,
        "stability_factor": 3.0,
    },
    "coeff_t1": {
        "ns": [2, 3],
        "d": 2,
        "cases": 2,
        "mc_count": 400_000,
        "eps_grid": {"min": 3e-3, "max": 1e-1, "points": 8},
        "slope_margin": 0.1,
    },
    "ind_deg": {
        "ds": [2, 3],
        "eps_grid": {"min": 1e-4, "max": 1e-2, "points": 12},
        "r2_min": 0.95,
        "oracle_rel_tol": 1e-4,
    },
    "coeff_t2": {
        "phases": [
            {"f": "x1*x2", "n": 2, "d": 2, "m": 1},
            {"f": "x1*x2*x3", "n": 3, "d": 3, "m": 1},
            {"f": "x1^2*x2", "n": 3, "d": 3, "m": 2},
        ],
        "mc_count": 400_000,
        "eps_grid": {"min": 3e-3, "max": 1e-1, "points": 8},
        "ratio_spread_max": 5.0,
    },
    "tv_k": {
        "deltas": [0.01, 0.02, 0.05, 0.1, 0.2, 0.3],
        "d": 2,
        "tolerance": 0.2,
        "grid": 50001,
    },
}

SUITES: dict[str, Callable[[ExperimentConfig], tuple[list[dict], dict, bool]]] = {
    "t_equiv": _suite_t_equiv,
    "t_meas": _suite_t_meas,
    "sublevel_8ek": _suite_sublevel_8ek,
    "quantile_4e": _suite_quantile_4e,
    "krug": _suite_krug,
    "mixture": _suite_mixture,
    "main_reg": _suite_main_reg,
    "osc_decay": _suite_osc_decay,
    "coeff_t1": _suite_coeff_t1,
    "ind_deg": _suite_ind_deg,
    "coeff_t2": _suite_coeff_t2,
    "tv_k": _suite_tv_k,
}


def run_suite(config: ExperimentConfig | dict, out_dir: str | Path | None = None) -> InequalityReport:
    """Execute one named suite and optionally write report.json / cases.csv."""
    if isinstance(config, dict):
        config = ExperimentConfig.from_dict(config)
    cases, constants, passed = SUITES[config.suite](config)
    report = InequalityReport(
        suite=config.suite,
        cases=cases,
        verdict="pass" if passed else "fail",
        constants=constants,
        seed=config.seed,
        version=_version_block(),
    )
    if out_dir is not None:
        report.write(out_dir)
    return report
