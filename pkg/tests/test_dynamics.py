import itertools

import numpy as np
import pytest

from hjreach.dynamics import Advection, DubinsCar, InputMode, Integrator1D
from hjreach.errors import DynamicsError

MIN, MAX = InputMode.MIN, InputMode.MAX
BOX = ((-0.1, -0.1, -0.1), (0.1, 0.1, 0.1))
CAR = DubinsCar(1.0, (-1.0, 1.0), *BOX)


def test_dubins_flow():
    np.testing.assert_allclose(DubinsCar(1.0).flow([0, 0, 0], [0.5], [0, 0, 0]), [1, 0, 0.5])
    np.testing.assert_allclose(CAR.flow([0, 0, np.pi / 2], [0.0], [0.1, 0, 0]), [0.1, 1, 0], atol=1e-15)


def test_integrator_flow():
    np.testing.assert_array_equal(Integrator1D().flow([0.3], [-1.0], []), [-1.0])


def test_flow_rejects_bad_inputs():
    with pytest.raises(DynamicsError):
        CAR.flow([0, 0, 0], [1.5], [0, 0, 0])
    with pytest.raises(DynamicsError):
        CAR.flow([0, 0, 0], [0.0], [0.2, 0, 0])
    with pytest.raises(DynamicsError):
        CAR.flow([0, 0], [0.0], [0, 0, 0])


def test_opt_ctrl_examples():
    assert CAR.opt_ctrl(0, [0, 0, 0], [5, 5, 0.7], MIN)[0] == -1.0
    assert CAR.opt_ctrl(0, [0, 0, 0], [5, 5, 0.0], MIN)[0] == -1.0
    # argmax of p3 * a with p3 < 0: evaluate both endpoints
    p3 = -0.7
    best = max([-1.0, 1.0], key=lambda a: p3 * a)
    assert CAR.opt_ctrl(0, [0, 0, 0], [5, 5, p3], MAX)[0] == best == -1.0


def test_opt_dstb_examples():
    p = np.array([0.3, -0.2, 0.1])
    np.testing.assert_array_equal(CAR.opt_dstb(0, [0, 0, 0], p, MAX), [0.1, -0.1, 0.1])
    corners = [np.array(c) for c in itertools.product(*zip(*BOX))]
    worst_min = min(corners, key=lambda d: p @ d)
    np.testing.assert_array_equal(CAR.opt_dstb(0, [0, 0, 0], p, MIN), worst_min)
    np.testing.assert_array_equal(worst_min, [-0.1, 0.1, -0.1])
    np.testing.assert_array_equal(DubinsCar(1.0).opt_dstb(0, [0, 0, 0], p, MAX), [0, 0, 0])


def test_empty_inputs():
    assert Integrator1D().opt_dstb(0, [0.0], [1.0], MAX).shape == (0,)
    assert Advection((1.0, 2.0)).opt_ctrl(0, [0, 0], [1, 1], MIN).shape == (0,)


def test_dissipation_examples():
    alpha = CAR.dissipation_bounds()
    np.testing.assert_allclose(alpha, [1.1, 1.1, 1.1])
    # independent check: dense lattice over (theta, a, d)
    th = np.linspace(-np.pi, np.pi, 721)
    best = np.zeros(3)
    for a in np.linspace(-1, 1, 5):
        for d in itertools.product(np.linspace(-0.1, 0.1, 3), repeat=3):
            f = CAR.flow(np.stack([0 * th, 0 * th, th]), np.full((1, th.size), a),
                         np.array(d)[:, None] * np.ones(th.size))
            best = np.maximum(best, np.abs(f).max(axis=1))
    np.testing.assert_allclose(best, alpha, atol=1e-12)
    np.testing.assert_array_equal(Integrator1D().dissipation_bounds(), [1.0])
    np.testing.assert_array_equal(Advection((2.0, -3.0)).dissipation_bounds(), [2.0, 3.0])


def test_construction_errors():
    with pytest.raises(DynamicsError):
        DubinsCar(0.0)
    with pytest.raises(DynamicsError):
        DubinsCar(1.0, (1.0, -1.0))
    with pytest.raises(DynamicsError):
        Integrator1D((2.0, 1.0))


SYSTEMS = [CAR, DubinsCar(2.0, (-0.5, 1.5), (-0.2, 0, -0.3), (0.1, 0.3, 0.0)), Integrator1D((-2.0, 0.5))]


@pytest.mark.parametrize("sys", SYSTEMS)
def test_bang_bang_optimality(sys):
    rng = np.random.default_rng(1)
    n = sys.state_dim
    m = 10_000
    x = rng.uniform(-3, 3, size=(n, m))
    p = rng.normal(size=(n, m))
    ulo, uhi = sys.control_bounds()
    dlo, dhi = sys.disturbance_bounds()
    d_fixed = rng.uniform(dlo[:, None], dhi[:, None], size=(len(dlo), m))
    u_fixed = rng.uniform(ulo[:, None], uhi[:, None], size=(len(ulo), m))
    u_min = sys.opt_ctrl(0, x, p, MIN)
    u_max = sys.opt_ctrl(0, x, p, MAX)
    d_min = sys.opt_dstb(0, x, p, MIN)
    d_max = sys.opt_dstb(0, x, p, MAX)
    dot = lambda u, d: np.sum(p * sys.flow(x, u, d), axis=0)
    h_umin, h_umax = dot(u_min, d_fixed), dot(u_max, d_fixed)
    h_dmin, h_dmax = dot(u_fixed, d_min), dot(u_fixed, d_max)
    for _ in range(100):
        u = rng.uniform(ulo[:, None], uhi[:, None], size=(len(ulo), m))
        d = rng.uniform(dlo[:, None], dhi[:, None], size=(len(dlo), m))
        assert np.all(h_umin <= dot(u, d_fixed) + 1e-12)
        assert np.all(h_umax >= dot(u, d_fixed) - 1e-12)
        assert np.all(h_dmin <= dot(u_fixed, d) + 1e-12)
        assert np.all(h_dmax >= dot(u_fixed, d) - 1e-12)
    for v, lo, hi in ((u_min, ulo, uhi), (u_max, ulo, uhi), (d_min, dlo, dhi), (d_max, dlo, dhi)):
        assert np.all(v >= lo[:, None]) and np.all(v <= hi[:, None])


@pytest.mark.parametrize("sys", SYSTEMS)
def test_dissipation_validity(sys):
    rng = np.random.default_rng(2)
    m = 10_000
    x = rng.uniform(-5, 5, size=(sys.state_dim, m))
    ulo, uhi = sys.control_bounds()
    dlo, dhi = sys.disturbance_bounds()
    u = rng.uniform(ulo[:, None], uhi[:, None], size=(len(ulo), m))
    d = rng.uniform(dlo[:, None], dhi[:, None], size=(len(dlo), m))
    f = np.abs(sys.flow(x, u, d))
    assert np.all(f <= sys.dissipation_bounds()[:, None] + 1e-12)


@pytest.mark.parametrize("sys", [CAR, Integrator1D()])
def test_mode_antisymmetry(sys):
    rng = np.random.default_rng(3)
    p = rng.normal(size=(sys.state_dim, 1000))
    p[p == 0] = 1.0
    np.testing.assert_array_equal(sys.opt_ctrl(0, None, p, MIN), sys.opt_ctrl(0, None, -p, MAX))
    np.testing.assert_array_equal(sys.opt_dstb(0, None, p, MIN), sys.opt_dstb(0, None, -p, MAX))


def test_mode_opposite():
    assert MIN.opposite is MAX and MAX.opposite is MIN
