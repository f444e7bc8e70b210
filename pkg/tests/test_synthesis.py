import itertools

import numpy as np
import pytest

from hjreach.dynamics import Advection, DubinsCar, InputMode, Integrator1D
from hjreach.errors import DomainError
from hjreach.grid import ValueField, create_grid, interpolate
from hjreach.shapes import shape_cylinder, shape_rectangle, shape_sphere
from hjreach.solver import MinWith, SolveConfig, SolveResult, solve
from hjreach.synthesis import (DisturbancePolicy, Outcome, compute_trajectory, gradient_at,
                               rk4_step)

MIN, MAX = InputMode.MIN, InputMode.MAX


def static_result(field):
    return SolveResult(np.array([0.0]), [field])


def test_gradient_affine():
    g = create_grid([-2, -1], [2, 3], [9, 11])
    X, Y = g.mesh()
    r = static_result(ValueField(g, 2 * X - Y + 0.5 + 0 * (X + Y)))
    rng = np.random.default_rng(0)
    for x in rng.uniform([-2, -1], [2, 3], size=(50, 2)):
        np.testing.assert_allclose(gradient_at(r, 0, x), [2, -1], atol=1e-10)


def test_gradient_sphere_against_finite_differences():
    g = create_grid([-4, -4], [4, 4], [81, 81])
    f = shape_sphere(g, [0, 0], 1)
    h = g.spacings[0]
    x = np.array([2.0, 0.0])
    grad = gradient_at(static_result(f), 0, x)
    fd = np.array([(interpolate(f, x + e) - interpolate(f, x - e)) / (2 * h) for e in np.eye(2) * h])
    np.testing.assert_allclose(grad, [1, 0], atol=h)
    np.testing.assert_allclose(grad, fd, atol=h)


def test_gradient_symmetric_zero():
    g = create_grid([-2], [2], [17])  # dyadic spacing keeps the nodes exactly symmetric
    assert gradient_at(static_result(ValueField(g, g.axes[0] ** 2)), 0, [0.0])[0] == 0.0


def test_gradient_quadratic_tolerance():
    g = create_grid([-2, -2], [2, 2], [41, 41])
    X, Y = g.mesh()
    f = ValueField(g, X**2 + 0.5 * X * Y - Y**2)
    r = static_result(f)
    h = 0.1
    rng = np.random.default_rng(1)
    for x in rng.uniform(-1.5, 1.5, size=(100, 2)):
        fd = np.array([(interpolate(f, x + e) - interpolate(f, x - e)) / (2 * h) for e in np.eye(2) * h])
        np.testing.assert_allclose(gradient_at(r, 0, x), fd, atol=10 * h**2 + 1e-8)


def test_gradient_out_of_domain():
    g = create_grid([-1], [1], [21])
    with pytest.raises(DomainError):
        gradient_at(static_result(ValueField(g, g.axes[0])), 0, [1.5])


def test_rk4_advection_exact():
    sys = Advection((0.7, -1.3))
    x = np.array([0.2, 0.1])
    for _ in range(10):
        x = rk4_step(sys, x, np.zeros(0), np.zeros(0), 0.0, 0.1)
    np.testing.assert_allclose(x, [0.9, -1.2], atol=1e-12)


def test_rk4_dubins_circle_with_wrap():
    g = create_grid([-5, -5, -np.pi], [5, 5, np.pi], [11, 11, 12], [False, False, True])
    car = DubinsCar(1.0)
    x = np.array([0.0, 0.0, 0.0])
    dt, t = 0.01, 0.0
    for _ in range(1000):
        x = g.wrap(rk4_step(car, x, np.array([1.0]), np.zeros(3), t, dt))
        t += dt
        assert -np.pi <= x[2] < np.pi
    np.testing.assert_allclose(x[:2], [np.sin(t), 1 - np.cos(t)], atol=1e-8)


@pytest.fixture(scope="module")
def integrator_tube():
    g = create_grid([-4], [4], [201])
    cfg = SolveConfig(Integrator1D(), g, shape_rectangle(g, [-1], [1]), np.linspace(0, 1, 21))
    return solve(cfg)


def test_trajectory_starting_in_target(integrator_tube):
    traj = compute_trajectory(integrator_tube, Integrator1D(), [0.5])
    assert traj.outcome is Outcome.REACHED_TARGET
    assert len(traj.times) == 1 and traj.controls.shape == (0, 1)


def test_trajectory_reaches(integrator_tube):
    h = integrator_tube.grid.spacings[0]
    traj = compute_trajectory(integrator_tube, Integrator1D(), [1.8], MIN, MAX, substeps_per_interval=4)
    assert traj.outcome is Outcome.REACHED_TARGET
    assert abs(traj.final_state[0]) <= 1 + 2 * h
    # closed form under u = -1: x(t) = 1.8 - t, entering the target at t = 0.8
    np.testing.assert_allclose(traj.states[:, 0], 1.8 - traj.times, atol=1e-12)
    assert traj.times[-1] == pytest.approx(0.8, abs=0.0125 + 1e-9)
    assert np.all(traj.controls == -1.0)
    assert np.all(np.diff(traj.times) > 0)
    assert len(traj.states) == len(traj.times) == len(traj.controls) + 1


def test_trajectory_cannot_reach(integrator_tube):
    h = integrator_tube.grid.spacings[0]
    traj = compute_trajectory(integrator_tube, Integrator1D(), [2.5])
    assert traj.outcome is Outcome.HORIZON_EXHAUSTED
    assert np.min(traj.values) > -2 * h
    # exhaustive bang-bang enumeration: no control sequence reaches |x| <= 1 within 1 s
    best = min(
        np.min(np.abs(2.5 + np.cumsum(np.array(seq) * 0.1)))
        for seq in itertools.product((-1.0, 1.0), repeat=10)
    )
    assert best > 1.0


def test_value_consistency_integrator(integrator_tube):
    h = integrator_tube.grid.spacings[0]
    for x0 in np.linspace(-1.95, 1.95, 27):
        traj = compute_trajectory(integrator_tube, Integrator1D(), [x0])
        assert np.all(traj.values <= 2 * h + 1e-6)


def test_left_domain():
    g = create_grid([-3], [3], [61])
    r = solve(SolveConfig(Advection((1.0,)), g, shape_rectangle(g, [-2.5], [-2.0]), [0, 0.5, 1],
                          min_with=MinWith.NONE))
    traj = compute_trajectory(r, Advection((1.0,)), [2.8])
    assert traj.outcome is Outcome.LEFT_DOMAIN
    assert traj.final_state[0] > 3.0


def test_initial_state_out_of_domain(integrator_tube):
    with pytest.raises(DomainError):
        compute_trajectory(integrator_tube, Integrator1D(), [5.0])


def test_dubins_value_consistency():
    g = create_grid([-5, -5, -np.pi], [5, 5, np.pi], [41, 41, 36], [False, False, True])
    car = DubinsCar(1.0, (-1, 1), (-0.1,) * 3, (0.1,) * 3)
    r = solve(SolveConfig(car, g, shape_cylinder(g, [2], [0, 0], 1), np.linspace(0, 1, 11)))
    h = max(g.spacings)
    rng = np.random.default_rng(7)
    n = 0
    while n < 8:
        x0 = rng.uniform([-3, -3, -np.pi], [3, 3, np.pi])
        if r.value_at(len(r.tau) - 1, x0) > 0 or r.value_at(0, x0) <= 0:
            continue
        n += 1
        traj = compute_trajectory(r, car, x0, MIN, MAX, DisturbancePolicy.WORST, 4)
        assert np.all(traj.values <= 2 * h + 1e-6)
