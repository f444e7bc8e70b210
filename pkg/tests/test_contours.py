import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hjreach.contours import SliceSpec, extract_contours, marching_squares
from hjreach.errors import GridError
from hjreach.grid import ValueField, create_grid, interpolate
from hjreach.shapes import shape_cylinder, shape_sphere

PLANE = create_grid([-2, -2], [2, 2], [41, 41])
DUBINS = create_grid([-5, -5, -np.pi], [5, 5, np.pi], [51, 51, 36], [False, False, True])


def test_circle_slice():
    polys = extract_contours(shape_cylinder(DUBINS, [2], [0.5, -0.5], 1.5), SliceSpec((0, 1), {2: 0.0}))
    assert len(polys) == 1
    p = polys[0]
    np.testing.assert_array_equal(p[0], p[-1])
    r = np.hypot(p[:, 0] - 0.5, p[:, 1] + 0.5)
    assert np.max(np.abs(r - 1.5)) <= DUBINS.spacings[0]
    assert len(p) > 20


def test_empty_cases():
    s = shape_sphere(PLANE, [0, 0], 1)
    assert extract_contours(ValueField(PLANE, s.values + 10), SliceSpec()) == []
    assert extract_contours(s, SliceSpec(), level=-5.0) == []


def test_periodic_free_dim_stays_closed():
    # band in theta around 0 wraps across the seam; the slice over (x, theta) has one closed curve
    g = create_grid([-2, -np.pi], [2, np.pi], [21, 24], [False, True])
    X, T = g.mesh()
    f = ValueField(g, X**2 + (1 - np.cos(T)) - 1.0 + 0 * T)
    polys = extract_contours(f, SliceSpec((0, 1)))
    assert all(np.array_equal(p[0], p[-1]) for p in polys)


def test_saddle_resolved_by_center():
    xs = ys = np.array([0.0, 1.0])
    # diagonal corners positive; center average decides connectivity
    A = np.array([[1.0, -1.0], [-1.0, 1.0]])
    hi = marching_squares(xs, ys, A + 0.5, 0.0)   # center > 0: negative corners cut off
    lo = marching_squares(xs, ys, A - 0.5, 0.0)   # center < 0: positive corners cut off
    assert len(hi) == len(lo) == 2
    for polys, corners in ((hi, [(1, 0), (0, 1)]), (lo, [(0, 0), (1, 1)])):
        for c in corners:
            # each isolated corner gets its own segment whose endpoints lie on that corner's edges
            assert any(np.all(np.isclose(p[:, 0], c[0]) | np.isclose(p[:, 1], c[1])) for p in polys)


def test_invalid_slices():
    f = shape_cylinder(DUBINS, [2], [0, 0], 1)
    for spec in (SliceSpec((0, 0)), SliceSpec((0, 3)), SliceSpec((0, 1), {1: 0.0}),
                 SliceSpec((0, 2), {1: 7.0})):
        with pytest.raises(GridError):
            extract_contours(f, spec)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.floats(-0.5, 0.5))
def test_vertices_on_level(seed, level):
    rng = np.random.default_rng(seed)
    g = create_grid([-1, -1], [1, 1], [9, 9])
    f = ValueField(g, rng.normal(size=g.shape))
    polys = extract_contours(f, SliceSpec(), level)
    for p in polys:
        assert len(p) >= 2
        for v in p:
            assert abs(interpolate(f, v) - level) <= 1e-9
