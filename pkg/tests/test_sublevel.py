import math

import numpy as np
import pytest

from corput_lab.density import PiecewiseDensity1D
from corput_lab.harness import random_step_density
from corput_lab.measures import Box, UniformBody, philox_rng
from corput_lab.poly import Polynomial1D, parse_polynomial
from corput_lab.sublevel import (
    cw_ratio,
    divided_diff,
    quantile_points,
    sublevel_measure_1d,
    sublevel_measure_mc,
)

UNIFORM = PiecewiseDensity1D.uniform(0.0, 1.0)


def test_sublevel_examples():
    assert sublevel_measure_1d(UNIFORM, Polynomial1D((0.0, 1.0)), 0.3) == pytest.approx(0.3)
    half_square = Polynomial1D((0.0, 0.0, 0.5))
    for eps in (0.01, 0.1, 0.4, 0.9):
        expected = min(math.sqrt(2.0 * eps), 1.0)
        assert sublevel_measure_1d(UNIFORM, half_square, eps) == pytest.approx(expected)
        # explicit constant from the k=2 sublevel bound
        assert expected <= 8.0 * math.e * 2 * 1.0 * eps**0.5
    mu = UniformBody(Box.cube(3))
    val, se = sublevel_measure_mc(mu, parse_polynomial("x1", n=3), 0.1, count=10**5, seed=2)
    assert abs(val - 0.2) <= 3.0 * se


def test_sublevel_monotone_in_eps():
    rng = philox_rng(5)
    rho = random_step_density(rng)
    f = Polynomial1D((0.05, -0.4, 0.0, 1.0 / 6.0))
    vals = [sublevel_measure_1d(rho, f, e) for e in np.geomspace(1e-3, 1.0, 12)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_8ek_bound_property():
    rng = philox_rng(101)
    for _ in range(30):
        k = int(rng.choice([2, 3, 4]))
        lead = 1.0 / math.factorial(k)
        lower = rng.uniform(-1.0, 1.0, k) * lead
        f = Polynomial1D(tuple(lower) + (lead,))
        rho = random_step_density(rng, span=(-1.0, 1.0))
        sup = rho.sup_norm
        for eps in np.geomspace(1e-4, 1e-1, 7):
            lhs = sublevel_measure_1d(rho, f, float(eps))
            assert lhs <= 8.0 * math.e * k * sup * eps ** (1.0 / k)


def test_divided_diff_examples():
    cert = divided_diff([0.0, 1.0, 2.0])
    assert cert.coefficients == (1.0, -2.0, 1.0)
    assert cert.apply(Polynomial1D((0.0, 0.0, 1.0))) == pytest.approx(2.0)
    assert cert.apply(Polynomial1D((0.0, 1.0))) == 0.0
    with pytest.raises(ValueError):
        divided_diff([0.0, 1e-16, 1.0])


def test_divided_diff_exactness_property():
    rng = philox_rng(7)
    for _ in range(100):
        k = int(rng.integers(1, 7))
        while True:
            pts = np.sort(rng.uniform(-1.0, 1.0, k + 1))
            if np.min(np.diff(pts)) > 0.05:
                break
        cert = divided_diff(pts)
        coeffs = rng.uniform(-2.0, 2.0, k + 1)
        if abs(coeffs[-1]) < 0.1:
            coeffs[-1] = 0.5
        p = Polynomial1D(tuple(coeffs))
        got = cert.apply(p)
        expected = math.factorial(k) * coeffs[-1]
        assert got == pytest.approx(expected, rel=1e-8)
        # annihilates lower degrees
        q = Polynomial1D(tuple(coeffs[:-1]))
        if k >= 1 and not q.is_zero:
            scale = sum(abs(c) for c in cert.coefficients)
            assert abs(cert.apply(q)) <= 1e-9 * scale * max(
                abs(c) for c in q.coeffs
            ) * (k + 1)


def test_quantile_examples():
    rep = quantile_points(UNIFORM, [(0.0, 1.0)], 2)
    assert rep.points == pytest.approx((0.0, 0.5, 1.0))
    assert rep.min_product == pytest.approx(0.25)
    assert rep.threshold == pytest.approx((1.0 / (4.0 * math.e)) ** 2)
    assert rep.min_product >= rep.threshold

    rep = quantile_points(UNIFORM, [(0.0, 0.25), (0.75, 1.0)], 1)
    assert rep.points == pytest.approx((0.0, 1.0))

    rep = quantile_points(UNIFORM, [(0.2, 0.7)], 1)
    assert rep.points == pytest.approx((0.2, 0.7))

    with pytest.raises(ValueError):
        quantile_points(UNIFORM, [(2.0, 3.0)], 1)


def test_quantile_separation_property():
    rng = philox_rng(19)
    for _ in range(50):
        rho = random_step_density(rng)
        k = int(rng.integers(1, 5))
        e_set = [(float(a), float(a + w)) for a, w in [(rng.uniform(0, 0.5), rng.uniform(0.2, 0.5))]]
        if rho.integral_over(e_set) <= 1e-9:
            continue
        rep = quantile_points(rho, e_set, k)
        assert rep.min_product >= rep.threshold
        assert all(b > a for a, b in zip(rep.points, rep.points[1:]))


def test_cw_ratio_examples():
    shifted = PiecewiseDensity1D.uniform(0.0, 1.0)
    res = cw_ratio(shifted, Polynomial1D((0.0, 1.0)), t_grid=np.geomspace(1e-3, 0.9, 16))
    assert res.max_ratio == pytest.approx(3.0**-0.5, rel=1e-9)
    ratios = [r for _, r in res.pairs]
    assert max(ratios) / min(ratios) == pytest.approx(1.0, rel=1e-9)

    res2 = cw_ratio(shifted, Polynomial1D((0.0, 0.0, 1.0)), t_grid=np.geomspace(1e-3, 0.9, 16))
    assert res2.max_ratio == pytest.approx(5.0**-0.25, rel=1e-9)

    mu = UniformBody(Box.cube(2))
    res3 = cw_ratio(mu, parse_polynomial("x1*x2"), t_grid=np.geomspace(1e-4, 1e-1, 12), count=10**5, seed=3)
    # finite, bounded, and no blow-up toward t -> 0
    assert np.isfinite(res3.max_ratio) and res3.max_ratio < 1.0
    assert res3.argmax_t > 1e-3


def test_cw_ratio_dimension_stability():
    t_grid = np.geomspace(1e-3, 1e-1, 10)
    maxima = []
    for n in (2, 4, 8):
        f = parse_polynomial(" + ".join(f"x{j+1}^2" for j in range(n)), n=n) - n / 12.0
        res = cw_ratio(UniformBody(Box.cube(n)), f, t_grid=t_grid, count=2 * 10**5, seed=21)
        maxima.append(res.max_ratio)
    assert max(maxima) / min(maxima) <= 3.0


def test_cw_ratio_rejects_constant():
    with pytest.raises(ValueError):
        cw_ratio(UNIFORM, Polynomial1D((1.0,)))
