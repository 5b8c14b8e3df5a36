import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pfunc.errors import BallOutOfBounds, DegenerateHessian, GridTooSmall, NonFinite
from pfunc.grid import (Field2, Grid2, ball_average, biharmonic, det_hessian, extrema, grad_laplacian, gradient,
                        hessian, laplacian, ma_drift)


def field(fn, lo=-1.0, hi=1.0, n=41):
    return Field2.from_function(Grid2.square(lo, hi, n), fn)


def test_grid_rejects_small_and_bad_spacing():
    with pytest.raises(GridTooSmall):
        Grid2(4, 10, 0.1, 0.1)
    with pytest.raises((ValueError, GridTooSmall)):
        Grid2(10, 10, 0.0, 0.1)


@settings(max_examples=50, deadline=None)
@given(i=st.integers(0, 30), j=st.integers(0, 20))
def test_index_coordinate_roundtrip(i, j):
    g = Grid2.rect((-0.7, 2.3), (0.1, 2.1), 0.1)
    assert g.index(*g.coord(i, j)) == (i, j)


def test_field_rejects_nonfinite():
    g = Grid2.square(0, 1, 6)
    v = np.zeros((6, 6))
    v[2, 3] = np.nan
    with pytest.raises(NonFinite):
        Field2(g, v)


# -- polynomial exactness ----------------------------------------------------

def _scale(f):
    return 1 + np.max(np.abs(f.values))


def test_quadratic_exactness():  # [TRIVIAL]
    u = field(lambda x, y: x * x + y * y)
    tol = 1e-12 * _scale(u) / u.grid.h ** 2
    assert np.allclose(laplacian(u).valid(), 4, atol=tol)
    uxx, uxy, uyx, uyy = hessian(u)
    assert np.allclose(uxx.valid(), 2, atol=tol) and np.allclose(uyy.valid(), 2, atol=tol)
    assert np.allclose(uxy.valid(), 0, atol=tol) and uxy is uyx
    gx, gy = gradient(u)
    X, Y = gx.valid_coords()
    assert np.allclose(gx.valid(), 2 * X, atol=1e-12) and np.allclose(gy.valid(), 2 * Y, atol=1e-12)
    assert np.allclose(biharmonic(u).valid(), 0, atol=1e-12 * _scale(u) / u.grid.h ** 4)


def test_cubic_exactness():  # [TRIVIAL]
    u = field(lambda x, y: x ** 3 + 0 * y)
    gx, gy = grad_laplacian(u)
    h = u.grid.h
    assert np.allclose(gx.valid(), 6, atol=1e-12 * _scale(u) / h ** 3)
    assert np.allclose(gy.valid(), 0, atol=1e-12 * _scale(u) / h ** 3)
    assert np.allclose(biharmonic(u).valid(), 0, atol=1e-12 * _scale(u) / h ** 4)
    assert gx.margin == 2 and laplacian(u).margin == 1


def test_boundary_gradient_one_sided_exact_on_quadratics():
    u = field(lambda x, y: x * x - 3 * x * y)
    gx, _ = gradient(u)
    X, Y = u.grid.mesh()
    assert np.allclose(gx.values, 2 * X - 3 * Y, atol=1e-11)


def test_biharmonic_needs_nine_nodes():
    with pytest.raises(GridTooSmall):
        biharmonic(field(lambda x, y: x * y, n=8))


def test_sin_laplacian_accuracy_and_order():  # [DERIVED] analytic Laplacian
    errs = []
    for n in (201, 401):
        u = field(lambda x, y: np.sin(x) * np.sin(y), n=n)
        lap = laplacian(u)
        X, Y = lap.valid_coords()
        errs.append(np.max(np.abs(lap.valid() + 2 * np.sin(X) * np.sin(Y))))
    assert errs[0] <= 1e-3
    assert math.log2(errs[0] / errs[1]) >= 1.9


@pytest.mark.parametrize("op", ["gradient", "laplacian", "hessian", "grad_laplacian", "biharmonic"])
def test_refinement_ratio(op):
    fn = lambda x, y: np.sin(x) * np.sin(y)
    exact = {
        "gradient": lambda X, Y: np.cos(X) * np.sin(Y),
        "laplacian": lambda X, Y: -2 * np.sin(X) * np.sin(Y),
        "hessian": lambda X, Y: np.cos(X) * np.cos(Y),
        "grad_laplacian": lambda X, Y: -2 * np.cos(X) * np.sin(Y),
        "biharmonic": lambda X, Y: 4 * np.sin(X) * np.sin(Y),
    }[op]
    pick = {
        "gradient": lambda u: gradient(u)[0],
        "laplacian": laplacian,
        "hessian": lambda u: hessian(u)[1],
        "grad_laplacian": lambda u: grad_laplacian(u)[0],
        "biharmonic": biharmonic,
    }[op]
    errs = []
    for n in (41, 81):
        g = Grid2.square(0.0, 1.0, n)
        r = pick(Field2.from_function(g, fn))
        X, Y = r.valid_coords()
        errs.append(np.max(np.abs(r.valid() - exact(X, Y))))
    assert errs[0] / errs[1] >= 3.6


# -- Monge-Ampere pieces -------------------------------------------------------

def test_det_and_drift_unit_quadratic():  # [TRIVIAL]
    u = field(lambda x, y: 0.5 * (x * x + y * y))
    assert np.allclose(det_hessian(u).valid(), 1, atol=1e-10)
    bx, by = ma_drift(u)
    assert np.allclose(bx.valid(), 0, atol=1e-6) and np.allclose(by.valid(), 0, atol=1e-6)


def test_det_and_drift_anisotropic():  # [TRIVIAL]
    u = field(lambda x, y: 0.5 * (2 * x * x + 3 * y * y))
    assert np.allclose(det_hessian(u).valid(), 6, atol=1e-9)
    bx, by = ma_drift(u)
    assert np.max(np.abs(bx.valid())) < 1e-6 and np.max(np.abs(by.valid())) < 1e-6


def test_drift_with_exponential():  # [DERIVED] hand differentiation
    u = field(lambda x, y: 0.5 * (x * x + y * y) + 0.1 * np.exp(x), n=201)
    X, Y = det_hessian(u).valid_coords()
    e = 0.1 * np.exp(X)
    assert np.allclose(det_hessian(u).valid(), 1 + e, atol=1e-4)
    bx, by = ma_drift(u)
    Xb, _ = bx.valid_coords()
    eb = 0.1 * np.exp(Xb)
    assert np.allclose(bx.valid(), eb / (1 + eb), atol=1e-3)
    assert np.max(np.abs(by.valid())) < 1e-3


def test_drift_consistency_with_hessian():
    u = field(lambda x, y: np.exp(x) + np.cosh(y) + 0.3 * x * y, n=81)
    bx, by = ma_drift(u)
    uxx, uxy, _, uyy = hessian(u)
    gx, gy = grad_laplacian(u)
    sl = bx.valid_slice()
    scale = 1 + np.max(np.abs(gx.values[sl])) + np.max(np.abs(gy.values[sl]))
    r1 = uxx.values * bx.values + uxy.values * by.values - gx.values
    r2 = uxy.values * bx.values + uyy.values * by.values - gy.values
    assert np.max(np.abs(r1[sl])) <= 1e-8 * scale and np.max(np.abs(r2[sl])) <= 1e-8 * scale


def test_drift_degenerate_hessian():
    with pytest.raises(DegenerateHessian):
        ma_drift(field(lambda x, y: x * x + 0 * y))


# -- ball averages and extrema ---------------------------------------------------

def test_ball_average_constant():  # [TRIVIAL]
    assert ball_average(field(lambda x, y: 5.0 + 0 * x), (0.0, 0.0), 0.5) == 5.0


def test_ball_average_radius_squared():  # [DERIVED] polar integral gives r^2/2
    u = Field2.from_function(Grid2.square(-1.2, 1.2, 481), lambda x, y: x * x + y * y)
    assert ball_average(u, (0.0, 0.0), 1.0) == pytest.approx(0.5, abs=1e-3)


def test_ball_average_odd_symmetry():  # [TRIVIAL]
    u = field(lambda x, y: x + 0 * y, n=101)
    assert abs(ball_average(u, (0.0, 0.0), 0.63)) <= 1e-6


def test_ball_out_of_bounds():
    u = field(lambda x, y: x * y)
    with pytest.raises(BallOutOfBounds):
        ball_average(u, (0.8, 0.0), 0.5)
    with pytest.raises(BallOutOfBounds):
        ball_average(laplacian(u), (0.0, 0.0), 1.0)


def test_extrema_linear():  # [TRIVIAL]
    e = extrema(field(lambda x, y: x + 0 * y, 0.0, 1.0, 11))
    assert e["interiorMax"] < e["boundaryMax"] == 1.0


def test_extrema_constant():  # [TRIVIAL]
    e = extrema(field(lambda x, y: 5.0 + 0 * x))
    assert e["interiorMax"] == e["boundaryMax"] == 5.0
    assert e["boundaryArgmax"] == (-1.0, -1.0)


def test_extrema_concave_bump():  # [TRIVIAL]
    e = extrema(field(lambda x, y: -(x * x + y * y)))
    assert e["interiorMax"] == 0.0 > e["boundaryMax"]
    assert e["interiorArgmax"] == (0.0, 0.0)


def test_extrema_respects_margin():
    lap = laplacian(field(lambda x, y: x ** 3 + 0 * y, 0.0, 1.0, 11))
    e = extrema(lap)
    assert e["boundaryMax"] == pytest.approx(6 * 0.9)


# -- CSV ---------------------------------------------------------------------------

def test_csv_roundtrip():
    u = Field2.from_function(Grid2.rect((0.0, 1.0), (-0.5, 0.5), 0.125), lambda x, y: np.sin(3 * x) + y / 7)
    text = u.to_csv()
    assert text.splitlines()[0] == "x,y,value"
    back = Field2.from_csv(text)
    assert np.array_equal(back.values, u.values)
    assert back.grid.nx == u.grid.nx and back.grid.ny == u.grid.ny
