"""
Closed-loop controller synthesis from a solved value function.

The control at state ``x`` with remaining horizon ``tau[k]`` is the
bang-bang optimizer of ``grad V(tau[k], x) . f(x, u, d)``. The gradient is
taken by central differences on the stored field and then interpolated.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .dynamics import InputMode, System
from .errors import DomainError
from .grid import central_gradient, interpolate, interpolate_array
from .solver import SolveResult


class Outcome(enum.Enum):
    REACHED_TARGET = "reached_target"
    HORIZON_EXHAUSTED = "horizon_exhausted"
    LEFT_DOMAIN = "left_domain"


class DisturbancePolicy(enum.Enum):
    WORST = "worst"
    ZERO = "zero"


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    controls: np.ndarray
    disturbances: np.ndarray
    values: np.ndarray
    outcome: Outcome

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def _gradient_fields(result: SolveResult, k: int) -> list[np.ndarray]:
    cache = result._cache.setdefault("grad", {})
    if k not in cache:
        cache[k] = central_gradient(result.fields[k].values, result.grid)
    return cache[k]


def gradient_at(result: SolveResult, k: int, x) -> np.ndarray:
    """Costate ``grad V(tau[k], x)`` by interpolated central differences."""
    grid = result.grid
    x = np.asarray(x, dtype=float)
    if not grid.contains(x):
        raise DomainError(f"state {x.tolist()} lies outside the grid")
    return np.array([
        interpolate_array(g, grid, x[None, :])[0] for g in _gradient_fields(result, k)
    ])


def rk4_step(sys: System, x, u, d, t: float, dt: float) -> np.ndarray:
    """Classical Runge-Kutta step with the inputs held constant."""
    k1 = sys.flow(x, u, d, t)
    k2 = sys.flow(x + 0.5 * dt * k1, u, d, t + 0.5 * dt)
    k3 = sys.flow(x + 0.5 * dt * k2, u, d, t + 0.5 * dt)
    k4 = sys.flow(x + dt * k3, u, d, t + dt)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _value(result: SolveResult, remaining: float, x) -> float:
    tau = result.tau
    k = int(np.searchsorted(tau, remaining))
    k = min(max(k, 1), len(tau) - 1) if len(tau) > 1 else 0
    if len(tau) == 1:
        return interpolate(result.fields[0], x)
    w = (remaining - tau[k - 1]) / (tau[k] - tau[k - 1])
    w = min(max(w, 0.0), 1.0)
    lo = interpolate(result.fields[k - 1], x)
    hi = interpolate(result.fields[k], x)
    return (1.0 - w) * lo + w * hi


def compute_trajectory(result: SolveResult, sys: System, x0, u_mode: InputMode = InputMode.MIN,
                       d_mode: InputMode = InputMode.MAX,
                       dstb_policy: DisturbancePolicy = DisturbancePolicy.WORST,
                       substeps_per_interval: int = 4) -> Trajectory:
    """Simulate optimal play from ``x0`` over the solved horizon.

    Stops early once the target (``fields[0] <= 0``) is reached or a
    non-periodic coordinate leaves the grid. ``values`` holds ``V`` at the
    remaining horizon, linearly interpolated in time between stored fields.
    """
    if substeps_per_interval < 1:
        raise ValueError("substeps_per_interval must be >= 1")
    grid = result.grid
    x = grid.wrap(np.asarray(x0, dtype=float))
    if x.shape != (grid.dim_count,) or not grid.contains(x):
        raise DomainError(f"initial state {np.asarray(x0).tolist()} lies outside the grid")
    target = result.fields[0]
    tau = result.tau
    horizon = float(tau[-1])

    times, states, values = [0.0], [x], [_value(result, horizon, x)]
    controls, dstbs = [], []
    outcome = Outcome.HORIZON_EXHAUSTED
    t = 0.0
    if interpolate(target, x) <= 0.0:
        outcome = Outcome.REACHED_TARGET
    else:
        for k in range(len(tau) - 1, 0, -1):
            dt = (tau[k] - tau[k - 1]) / substeps_per_interval
            for j in range(substeps_per_interval):
                remaining = tau[k] - j * dt
                p = gradient_at(result, k, x)
                u = sys.opt_ctrl(-remaining, x, p, u_mode)
                if dstb_policy is DisturbancePolicy.WORST:
                    d = sys.opt_dstb(-remaining, x, p, d_mode)
                else:
                    d = np.zeros(sys.disturbance_dim)
                x = grid.wrap(rk4_step(sys, x, u, d, -remaining, dt))
                t = horizon - tau[k] + (j + 1) * dt
                times.append(t)
                states.append(x)
                controls.append(np.asarray(u, dtype=float))
                dstbs.append(np.asarray(d, dtype=float))
                if not grid.contains(x):
                    values.append(np.nan)
                    outcome = Outcome.LEFT_DOMAIN
                    break
                values.append(_value(result, max(horizon - t, 0.0), x))
                if interpolate(target, x) <= 0.0:
                    outcome = Outcome.REACHED_TARGET
                    break
            if outcome is not Outcome.HORIZON_EXHAUSTED:
                break

    return Trajectory(
        times=np.array(times),
        states=np.array(states),
        controls=np.array(controls).reshape(len(controls), sys.control_dim),
        disturbances=np.array(dstbs).reshape(len(dstbs), sys.disturbance_dim),
        values=np.array(values),
        outcome=outcome,
    )
