import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from corput_lab.poly import Polynomial1D
from corput_lab.roots import real_roots, real_roots_simple


def test_basic_examples():
    assert real_roots(Polynomial1D((-1.0, 0.0, 1.0)), -2.0, 2.0) == [(-1.0, 1), (1.0, 1)]
    assert real_roots(Polynomial1D((1.0, 0.0, 1.0)), -2.0, 2.0) == []
    cube = Polynomial1D((-0.125, 0.75, -1.5, 1.0))  # (t - 1/2)^3
    [(root, mult)] = real_roots(cube, 0.0, 1.0)
    assert mult == 3
    assert root == pytest.approx(0.5, abs=1e-12)


def test_zero_polynomial_rejected():
    with pytest.raises(ValueError):
        real_roots(Polynomial1D((0.0,)), 0.0, 1.0)


def test_localization_width():
    # irrational root of t^2 - 2
    [(r, m)] = real_roots(Polynomial1D((-2.0, 0.0, 1.0)), 0.0, 2.0)
    assert m == 1
    assert abs(r - np.sqrt(2.0)) <= 1e-11


def test_mixed_multiplicities():
    # (t - 1)^2 (t + 1) = t^3 - t^2 - t + 1
    p = Polynomial1D((1.0, -1.0, -1.0, 1.0))
    roots = real_roots(p, -2.0, 2.0)
    assert [(round(r, 9), m) for r, m in roots] == [(-1.0, 1), (1.0, 2)]


def test_endpoint_root():
    p = Polynomial1D((0.0, 1.0))  # t
    assert real_roots(p, 0.0, 1.0) == [(0.0, 1)]


def test_high_degree_cluster():
    roots_true = [-0.9, -0.3, 0.11, 0.12, 0.7]
    cs = np.polynomial.polynomial.polyfromroots(roots_true)
    got = real_roots_simple(Polynomial1D(tuple(cs)), -1.0, 1.0)
    assert len(got) == 5
    assert np.allclose(sorted(got), roots_true, atol=1e-9)


@st.composite
def nonzero_polys(draw):
    deg = draw(st.integers(1, 6))
    coeffs = [draw(st.floats(-3, 3, allow_nan=False, width=32)) for _ in range(deg)]
    lead = draw(st.one_of(st.floats(0.125, 3, width=32), st.floats(-3, -0.125, width=32)))
    return Polynomial1D(tuple(coeffs) + (float(lead),))


@given(nonzero_polys())
@settings(max_examples=100, deadline=None)
def test_root_properties(p):
    roots = real_roots(p, -2.0, 2.0)
    assert sum(m for _, m in roots) <= p.degree()
    assert all(-2.0 <= r <= 2.0 for r, _ in roots)
    assert sorted(r for r, _ in roots) == [r for r, _ in roots]
    # sign change across each odd-multiplicity interior root
    width = 1e-6
    for r, m in roots:
        if m % 2 == 1 and -2.0 + width < r < 2.0 - width:
            left, right = p.eval(r - width), p.eval(r + width)
            if abs(left) > 1e-9 and abs(right) > 1e-9:
                assert (left < 0) != (right < 0)
