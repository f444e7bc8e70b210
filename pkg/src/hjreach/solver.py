"""
Level-set solver for the final-value Hamilton-Jacobi-Isaacs equation

    D_t V(t, x) + H(t, x, grad V) = 0,    V(0, x) = l(x),
    H(t, x, p) = opt_u opt_d  p . f(x, u, d).

Time is tracked as the elapsed horizon ``tau = -t >= 0``, so a backward
solve integrates ``dV/dtau = H``. A forward solve (forward reachable sets)
integrates ``dV/dtau = -H`` with the same modes, which is the change of
variables ``f -> -f`` with the roles of min and max exchanged; the
``mode_for`` table in :mod:`hjreach.config` follows this convention.

Discretization: first-order upwind differences, a global Lax-Friedrichs
numerical Hamiltonian, and two-stage TVD Runge-Kutta in time.
"""

from __future__ import annotations

import enum
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dynamics import InputMode, System
from .errors import DivergenceError, GridError
from .grid import Grid, ValueField, _one_sided, interpolate


class MinWith(enum.Enum):
    NONE = "none"
    TUBE = "tube"


class Direction(enum.Enum):
    BACKWARD = "backward"
    FORWARD = "forward"


@dataclass(frozen=True, eq=False)
class SolveConfig:
    system: System
    grid: Grid
    target: ValueField
    tau: Sequence[float]
    u_mode: InputMode = InputMode.MIN
    d_mode: InputMode = InputMode.MAX
    min_with: MinWith = MinWith.TUBE
    direction: Direction = Direction.BACKWARD
    obstacles: ValueField | None = None
    cfl_factor: float = 0.5

    def __post_init__(self):
        tau = np.asarray(self.tau, dtype=float).ravel()
        if tau.size == 0 or tau[0] != 0.0:
            raise ValueError("tau must start at 0")
        if np.any(np.diff(tau) <= 0):
            raise ValueError("tau not strictly increasing")
        if not np.all(np.isfinite(tau)):
            raise ValueError("tau must be finite")
        object.__setattr__(self, "tau", tau)
        if self.target.grid != self.grid:
            raise GridError("target is not on the solve grid")
        if self.obstacles is not None and self.obstacles.grid != self.grid:
            raise GridError("obstacles are not on the solve grid")
        if self.system.state_dim != self.grid.dim_count:
            raise GridError(
                f"system has {self.system.state_dim} states, grid has {self.grid.dim_count} dims"
            )
        if not 0.0 < self.cfl_factor <= 1.0:
            raise ValueError("cfl_factor must be in (0,1]")


@dataclass(frozen=True)
class SolveStats:
    steps: int
    wall_time: float
    dt_history: tuple[float, ...]


@dataclass(frozen=True, eq=False)
class SolveResult:
    tau: np.ndarray
    fields: list[ValueField]
    stats: SolveStats | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def grid(self) -> Grid:
        return self.fields[0].grid

    def value_at(self, k: int, x) -> float:
        return interpolate(self.fields[k], x)


def hamiltonian(sys: System, t, x, p, u_mode: InputMode, d_mode: InputMode):
    """``p . f(x, u*, d*)`` with the bang-bang optimal inputs for ``p``.

    Works on single vectors or on ``(state_dim, *batch)`` arrays.
    """
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    u = sys.opt_ctrl(t, x, p, u_mode)
    d = sys.opt_dstb(t, x, p, d_mode)
    f = sys.flow(x, u, d, t)
    h = p[0] * f[0]
    for i in range(1, sys.state_dim):
        h = h + p[i] * f[i]
    return h


def lf_numerical_hamiltonian(sys: System, t, x, p_left, p_right, alpha, u_mode: InputMode,
                             d_mode: InputMode, sign: float = 1.0):
    """Lax-Friedrichs numerical Hamiltonian

        H_hat = sign * H(x, (p_left + p_right) / 2) - sum_i alpha_i (p_right_i - p_left_i) / 2

    ``sign=-1`` gives the flux for ``-H``, which is what the backward
    update ``V <- V - dt * H_hat`` needs to stay monotone.
    """
    p_left = np.asarray(p_left, dtype=float)
    p_right = np.asarray(p_right, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha < 0):
        raise ValueError("dissipation coefficients must be non-negative")
    h = sign * hamiltonian(sys, t, x, 0.5 * (p_left + p_right), u_mode, d_mode)
    for i in range(p_left.shape[0]):
        h = h - alpha[i] * 0.5 * (p_right[i] - p_left[i])
    return h


def cfl_dt(alpha, spacings, cfl_factor: float = 0.5, remaining: float = np.inf) -> float:
    """Largest stable step ``cfl_factor / sum(alpha_i / h_i)``.

    Returns ``remaining`` when every coefficient is zero (nothing moves).
    """
    alpha = np.asarray(alpha, dtype=float)
    rate = float(np.sum(alpha / np.asarray(spacings, dtype=float)))
    if rate == 0.0:
        return float(remaining)
    return cfl_factor / rate


def _sign(direction: Direction) -> float:
    # Flux sign s in V_new = V - dt * H_hat(s * H): backward solves dV/dtau = +H.
    return -1.0 if direction is Direction.BACKWARD else 1.0


class _Stepper:
    """Vectorized Euler update over the whole grid, optionally split into slabs."""

    def __init__(self, sys, grid, u_mode, d_mode, direction, alpha, workers=1):
        self.sys = sys
        self.grid = grid
        self.u_mode = u_mode
        self.d_mode = d_mode
        self.sign = _sign(direction)
        self.alpha = np.asarray(alpha, dtype=float)
        self.mesh = [np.broadcast_to(m, grid.shape) for m in grid.mesh()]
        self.workers = max(1, int(workers))
        n0 = grid.shape[0]
        cuts = np.linspace(0, n0, min(self.workers, n0) + 1).astype(int)
        self.slabs = [slice(a, b) for a, b in zip(cuts[:-1], cuts[1:]) if b > a]
        self._pool = ThreadPoolExecutor(self.workers) if self.workers > 1 else None

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()

    def _flux(self, t, pl, pr, sl):
        x = np.stack([m[sl] for m in self.mesh])
        return lf_numerical_hamiltonian(
            self.sys, t, x, pl[:, sl], pr[:, sl], self.alpha,
            self.u_mode, self.d_mode, sign=self.sign,
        )

    def euler(self, v: np.ndarray, t: float, dt: float) -> np.ndarray:
        pairs = [_one_sided(v, self.grid, d) for d in range(self.grid.dim_count)]
        pl = np.stack([a for a, _ in pairs])
        pr = np.stack([b for _, b in pairs])
        if self._pool is None:
            h = self._flux(t, pl, pr, slice(None))
        else:
            parts = list(self._pool.map(lambda sl: self._flux(t, pl, pr, sl), self.slabs))
            h = np.concatenate(parts, axis=0)
        return v - dt * h


def _check_dt(alpha, grid, dt, cfl_factor=1.0):
    bound = cfl_dt(alpha, grid.spacings, 1.0)
    assert dt <= bound * (1 + 1e-12), f"dt {dt} violates the CFL bound {bound}"


def euler_step(field: ValueField, sys: System, t: float, dt: float, u_mode: InputMode,
               d_mode: InputMode, alpha, direction: Direction = Direction.BACKWARD) -> ValueField:
    """One forward-Euler step of length ``dt`` in the horizon variable."""
    _check_dt(alpha, field.grid, dt)
    st = _Stepper(sys, field.grid, u_mode, d_mode, direction, alpha)
    return ValueField(field.grid, st.euler(field.values, t, dt))


def tvd_rk2_step(field: ValueField, sys: System, t: float, dt: float, u_mode: InputMode,
                 d_mode: InputMode, alpha, direction: Direction = Direction.BACKWARD) -> ValueField:
    """Heun's method in Shu-Osher form: ``(V + E(E(V))) / 2``."""
    _check_dt(alpha, field.grid, dt)
    st = _Stepper(sys, field.grid, u_mode, d_mode, direction, alpha)
    return ValueField(field.grid, _rk2(st, field.values, t, dt))


def _rk2(st: _Stepper, v, t, dt):
    v1 = st.euler(v, t, dt)
    v2 = st.euler(v1, t + st.sign * dt, dt)
    return 0.5 * (v + v2)


def apply_min_with(candidate: ValueField, previous: ValueField) -> ValueField:
    candidate.same_grid(previous)
    return ValueField(candidate.grid, np.minimum(candidate.values, previous.values))


def apply_obstacles(field: ValueField, g_obs: ValueField) -> ValueField:
    """Force values inside the obstacle (``g_obs < 0``) to be positive."""
    field.same_grid(g_obs)
    return ValueField(field.grid, np.maximum(field.values, -g_obs.values))


def _diverged(v, grid, step, dt):
    bad = np.argwhere(~np.isfinite(v))[0]
    state = [lo + k * h for lo, k, h in zip(grid.mins, bad, grid.spacings)]
    return DivergenceError(
        f"non-finite value at state {state} on step {step} (dt={dt:g})",
        state=state, step=step, dt=dt,
    )


def solve(config: SolveConfig, workers: int = 1) -> SolveResult:
    """Integrate the value function over ``config.tau``.

    ``fields[k]`` approximates ``V(-tau[k], .)`` for backward problems and
    ``V(tau[k], .)`` for forward ones. Each internal substep is a TVD-RK2
    step, followed by the running minimum (tubes) and obstacle masking.

    ``workers > 1`` evaluates the Hamiltonian on slabs of the first axis in
    threads; results are bit-identical to the serial path.
    """
    t0 = time.perf_counter()
    grid = config.grid
    sys = config.system
    alpha = np.asarray(sys.dissipation_bounds(), dtype=float)
    obs = None if config.obstacles is None else config.obstacles.values
    neg_obs = None if obs is None else -obs

    v = config.target.values.copy()
    if neg_obs is not None:
        v = np.maximum(v, neg_obs)
    fields = [ValueField(grid, v)]
    dts = []
    step = 0
    stepper = _Stepper(sys, grid, config.u_mode, config.d_mode, config.direction, alpha, workers)
    tsign = -1.0 if config.direction is Direction.BACKWARD else 1.0
    try:
        for k in range(1, len(config.tau)):
            now, stop = config.tau[k - 1], config.tau[k]
            while now < stop:
                remaining = stop - now
                dt = min(cfl_dt(alpha, grid.spacings, config.cfl_factor, remaining), remaining)
                if remaining - dt <= 1e-12 * max(1.0, stop):
                    dt = remaining
                new = _rk2(stepper, v, tsign * now, dt)
                if config.min_with is MinWith.TUBE:
                    new = np.minimum(new, v)
                if neg_obs is not None:
                    new = np.maximum(new, neg_obs)
                step += 1
                if not np.all(np.isfinite(new)):
                    raise _diverged(new, grid, step, dt)
                v = new
                dts.append(dt)
                now = stop if dt == remaining else now + dt
            fields.append(ValueField(grid, v))
    finally:
        stepper.close()
    stats = SolveStats(step, time.perf_counter() - t0, tuple(dts))
    return SolveResult(config.tau.copy(), fields, stats)


def membership(field: ValueField) -> np.ndarray:
    """Boolean mask of the zero sublevel set."""
    return field.values <= 0.0
