import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from corput_lab.density import (
    GridMeasure1D,
    PiecewiseDensity1D,
    besov_seminorm,
    bv_seminorm,
    density_from_literal,
    density_sub,
    density_to_literal,
    distances,
    mixture_decompose,
    omega,
    shift_l1,
    sigma,
    sigma_of_density,
)
from corput_lab.harness import random_interval_union, random_step_density
from corput_lab.measures import philox_rng

UNIFORM = PiecewiseDensity1D.uniform(0.0, 1.0)
TENT = PiecewiseDensity1D.tent(0.0, 2.0)
STEP = PiecewiseDensity1D.step([0.0, 0.5, 1.0], [1.5, 0.5])


# ------------------------------------------------------------------ seminorms


def test_bv_seminorm_examples():
    assert bv_seminorm(UNIFORM) == pytest.approx(2.0)  # 2/(b-a)
    assert bv_seminorm(PiecewiseDensity1D.uniform(-1.0, 3.0)) == pytest.approx(0.5)
    assert bv_seminorm(TENT) == pytest.approx(2.0)
    assert bv_seminorm(STEP) == pytest.approx(3.0)  # jumps 3/2 + 1 + 1/2


def test_sup_norm_le_half_bv():
    rng = philox_rng(11)
    for _ in range(25):
        rho = random_step_density(rng)
        assert rho.sup_norm <= 0.5 * bv_seminorm(rho) + 1e-12


# ------------------------------------------------------------------- shift_l1


def test_shift_l1_examples():
    assert shift_l1(UNIFORM, 0.2) == pytest.approx(0.4)
    assert shift_l1(UNIFORM, 0.0) == 0.0
    assert shift_l1(UNIFORM, 2.0) == pytest.approx(2.0)


def test_signed_density_support():
    # difference measures: shift and BV work on signed pieces
    signed = density_sub(UNIFORM, TENT)
    assert shift_l1(signed, 0.3) == shift_l1(signed, -0.3)
    assert bv_seminorm(signed) > 0
    assert signed.abs_integral() == pytest.approx(distances(UNIFORM, TENT)[0])


def test_shift_l1_symmetry_exact():
    rng = philox_rng(3)
    for _ in range(10):
        rho = random_step_density(rng)
        h = float(rng.uniform(0.0, 0.6))
        assert shift_l1(rho, h) == shift_l1(rho, -h)


@given(
    st.floats(0.01, 0.4, allow_nan=False),
    st.floats(0.01, 0.4, allow_nan=False),
)
@settings(max_examples=30, deadline=None)
def test_shift_l1_subadditive(h1, h2):
    lhs = shift_l1(STEP, h1 + h2)
    assert lhs <= shift_l1(STEP, h1) + shift_l1(STEP, h2) + 1e-12


def test_shift_l1_tent_fine_grid_oracle():
    # hand derivation: m(h) = 2h - h^2/2 for the tent on [0, 2]
    for h in (0.05, 0.1, 0.3):
        x = np.linspace(-1.0, 3.0, 400001)
        oracle = np.trapezoid(np.abs(TENT.eval_many(x + h) - TENT.eval_many(x)), x)
        assert shift_l1(TENT, h) == pytest.approx(oracle, rel=1e-5)
        assert shift_l1(TENT, h) == pytest.approx(2 * h - h * h / 2, rel=1e-12)


# ---------------------------------------------------------------------- omega


def test_omega_examples():
    assert omega(UNIFORM, 0.2) == pytest.approx(0.4)
    assert omega(UNIFORM, 3.0) == pytest.approx(2.0)
    # frozen from the fine-grid shift oracle above: sup at h = eps
    assert omega(TENT, 0.1) == pytest.approx(0.195, rel=1e-6)


def test_omega_piecewise_constant_exact_at_kinks():
    # sup can be interior: breakpoint differences are candidate maximizers
    rho = PiecewiseDensity1D.step([0.0, 0.1, 0.2, 1.0], [3.0, 1.0, 0.5])
    eps = 0.15
    grid_vals = max(shift_l1(rho, h) for h in np.linspace(1e-4, eps, 4001))
    assert omega(rho, eps) >= grid_vals - 1e-12


# ---------------------------------------------------------------------- sigma


def test_sigma_uniform_example():
    grid = GridMeasure1D.from_density(UNIFORM, 0.2 / 64.0)
    assert sigma(grid, 0.2) == pytest.approx(0.4, rel=1e-6)


def test_sigma_single_atom():
    nu = GridMeasure1D(0.0, 0.01, np.array([1.0]))
    assert sigma(nu, 0.5) == pytest.approx(1.0, rel=1e-9)


def test_sigma_grid_too_coarse():
    nu = GridMeasure1D(0.0, 0.1, np.ones(10) * 0.1)
    with pytest.raises(ValueError):
        sigma(nu, 0.5)


def test_sigma_eps_zero_is_zero():
    nu = GridMeasure1D(0.0, 0.01, np.ones(100) * 0.01)
    assert sigma(nu, 0.0) == 0.0


def test_sigma_monotone_and_midpoint_concave():
    rng = philox_rng(17)
    rho = random_step_density(rng)
    eps_list = [0.02, 0.04, 0.08, 0.16]
    h = eps_list[0] / 16.0
    grid = GridMeasure1D.from_density(rho, h)
    vals = [sigma(grid, e) for e in eps_list]
    assert all(b >= a - 1e-9 for a, b in zip(vals, vals[1:]))
    for lo, mid, hi in zip(vals, vals[1:], vals[2:]):
        pass
    # midpoint concavity on a geometric grid: sigma((e1+e2)/2) >= avg
    for e1, e2 in zip(eps_list, eps_list[1:]):
        smid = sigma(grid, 0.5 * (e1 + e2))
        assert smid >= 0.5 * (sigma(grid, e1) + sigma(grid, e2)) - 1e-9


def test_sigma_of_density_refines():
    val = sigma_of_density(UNIFORM, 0.1)
    assert val == pytest.approx(0.2, rel=1e-3)


def test_sandwich_property():
    rng = philox_rng(23)
    for _ in range(20):
        rho = random_step_density(rng)
        for eps in (0.01, 0.1, 0.5):
            w = omega(rho, eps)
            s = sigma(GridMeasure1D.from_density(rho, eps / 64.0), eps)
            assert 0.5 * w * 0.95 <= s <= 6.0 * w * 1.05


def test_t_meas_property():
    rng = philox_rng(29)
    for _ in range(20):
        rho = random_step_density(rng)
        a_set = random_interval_union(rng)
        lam = sum(b - a for a, b in a_set)
        nu_a = rho.integral_over(a_set)
        s = sigma(GridMeasure1D.from_density(rho, lam / 128.0), lam)
        assert nu_a <= s + 1e-3


# ---------------------------------------------------------------------- besov


def test_besov_uniform_alpha1():
    grid = np.geomspace(1e-3, 1.0, 20)
    res = besov_seminorm(UNIFORM, 1.0, grid)
    assert res.value == pytest.approx(2.0, rel=1e-6)
    assert not res.diverging


def test_besov_tent_alpha1():
    grid = np.geomspace(1e-3, 1.0, 20)
    res = besov_seminorm(TENT, 1.0, grid, omega_grid=128)
    assert res.value == pytest.approx(2.0, rel=1e-2)
    assert not res.diverging


def _sqrt_singularity_density() -> PiecewiseDensity1D:
    # 1/(2 sqrt(s)) on (cutoff, 1]: dyadic Chebyshev blocks
    bps = [2.0**-k for k in range(28, -1, -1)]
    return PiecewiseDensity1D.from_function(
        lambda s: 0.5 / np.sqrt(s), [2.0**-29] + bps, degree=6
    )


def test_besov_sqrt_density():
    rho = _sqrt_singularity_density()
    grid = np.geomspace(1e-4, 0.5, 16)
    res_half = besov_seminorm(rho, 0.5, grid, omega_grid=64)
    assert not res_half.diverging
    assert res_half.value < 5.0
    res_one = besov_seminorm(rho, 1.0, grid, omega_grid=64)
    assert res_one.diverging


def test_grid_measure_csv_round_trip():
    g = GridMeasure1D(-0.25, 0.125, np.array([0.1, 0.4, 0.5]))
    row = g.to_csv_row()
    g2 = GridMeasure1D.from_csv_row(row)
    assert g2.left == g.left and g2.h == g.h
    assert np.array_equal(g2.weights, g.weights)


# -------------------------------------------------------------------- mixture


def test_mixture_examples():
    mix = mixture_decompose(UNIFORM)
    assert mix.components == ((0.0, 1.0, 1.0),)
    mix = mixture_decompose(STEP)
    assert set(mix.components) == {(0.0, 1.0, 0.5), (0.0, 0.5, 0.5)}
    assert mix.tv_total() == pytest.approx(3.0)
    bad = PiecewiseDensity1D.step([0.0, 0.5, 1.0], [2.5, -0.5])
    with pytest.raises(ValueError):
        mixture_decompose(bad)
    with pytest.raises(ValueError):
        mixture_decompose(UNIFORM.scale_values(2.0))


def test_mixture_reconstruction_property():
    rng = philox_rng(31)
    for _ in range(25):
        rho = random_step_density(rng, max_pieces=12)
        mix = mixture_decompose(rho)
        l1 = density_sub(mix.reconstruct(), rho).abs_integral()
        assert l1 <= 1e-12
        tv = bv_seminorm(rho)
        assert abs(mix.tv_total() - tv) <= 1e-12 * tv
        assert math.fsum(w for _, _, w in mix.components) == pytest.approx(1.0)


# ------------------------------------------------------------------ distances


def test_distances_examples():
    assert distances(UNIFORM, UNIFORM) == (0.0, 0.0)
    d_tv, d_k = distances(UNIFORM, PiecewiseDensity1D.uniform(0.5, 1.5))
    assert d_tv == pytest.approx(1.0)
    assert d_k == pytest.approx(0.5)
    for h in (0.1, 0.35, 0.9):
        d_tv, d_k = distances(UNIFORM, PiecewiseDensity1D.uniform(h, 1.0 + h))
        assert d_k == pytest.approx(h)
    with pytest.raises(ValueError):
        distances(UNIFORM, UNIFORM.scale_values(0.5))


def test_distances_smooth_case():
    d_tv, d_k = distances(UNIFORM, TENT)
    # brute force on a fine grid
    x = np.linspace(-0.5, 2.5, 600001)
    diff = UNIFORM.eval_many(x) - TENT.eval_many(x)
    assert d_tv == pytest.approx(np.trapezoid(np.abs(diff), x), rel=1e-5)
    cdf1 = np.array([UNIFORM.cdf(t) for t in np.linspace(-0.5, 2.5, 2001)])
    cdf2 = np.array([TENT.cdf(t) for t in np.linspace(-0.5, 2.5, 2001)])
    approx_dk = np.trapezoid(np.abs(cdf1 - cdf2), np.linspace(-0.5, 2.5, 2001))
    assert d_k == pytest.approx(approx_dk, rel=1e-3)


def test_density_literal_round_trip():
    lit = density_to_literal(STEP)
    rho = density_from_literal(lit)
    assert rho.breakpoints == STEP.breakpoints
    assert all(p.coeffs == q.coeffs for p, q in zip(rho.pieces, STEP.pieces))
    tent2 = density_from_literal(density_to_literal(TENT))
    assert tent2.eval(0.7) == pytest.approx(TENT.eval(0.7))
