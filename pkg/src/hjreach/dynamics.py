"""
Control systems ``x' = f(x, u, d)`` that are affine in the control ``u`` and
the disturbance ``d``.

All methods are vectorized: state and costate arguments have shape
``(state_dim, *batch)`` and inputs ``(input_dim, *batch)``; a plain 1-D
vector is the ``batch == ()`` case. Because ``f`` is affine in each input,
the Hamiltonian optimizers are bang-bang and given in closed form per
system. Any new system must provide the same closed forms.

Ties (a costate component exactly zero) resolve to the range minimum in
both modes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DynamicsError

_RANGE_TOL = 1e-12


class InputMode(enum.Enum):
    MIN = "min"
    MAX = "max"

    @property
    def opposite(self) -> "InputMode":
        return InputMode.MAX if self is InputMode.MIN else InputMode.MIN


def bang_bang(p, lo, hi, mode: InputMode):
    """Endpoint of ``[lo, hi]`` optimizing ``p * u``; ``p == 0`` picks ``lo``."""
    if mode is InputMode.MIN:
        return np.where(p >= 0, lo, hi)
    return np.where(p > 0, hi, lo)


def _as_state(x, n: int, what: str = "state") -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[0] != n:
        raise DynamicsError(f"{what} must have leading size {n}, got shape {x.shape}")
    return x


def _check_range(v, lo, hi, what: str) -> None:
    lo = np.reshape(lo, (-1,) + (1,) * (v.ndim - 1))
    hi = np.reshape(hi, (-1,) + (1,) * (v.ndim - 1))
    if np.any(v < lo - _RANGE_TOL) or np.any(v > hi + _RANGE_TOL):
        raise DynamicsError(f"{what} outside its admissible range")


class System:
    """Interface shared by the concrete systems."""

    state_dim: int
    control_dim: int
    disturbance_dim: int

    def flow(self, x, u, d, t=0.0) -> np.ndarray:
        raise NotImplementedError

    def opt_ctrl(self, t, x, p, mode: InputMode) -> np.ndarray:
        raise NotImplementedError

    def opt_dstb(self, t, x, p, mode: InputMode) -> np.ndarray:
        raise NotImplementedError

    def dissipation_bounds(self, region=None) -> np.ndarray:
        raise NotImplementedError

    def control_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def disturbance_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def _empty(self, x) -> np.ndarray:
        return np.zeros((0,) + np.shape(x)[1:])


@dataclass(frozen=True)
class DubinsCar(System):
    """Planar car at constant speed with a bounded turn rate.

    State ``(p_x, p_y, theta)``; control is the turn rate ``a``; the
    disturbance adds ``(d1, d2, d3)`` to the three velocity components.
    """

    speed: float = 1.0
    control_range: tuple[float, float] = (-1.0, 1.0)
    dstb_min: tuple[float, float, float] = (0.0, 0.0, 0.0)
    dstb_max: tuple[float, float, float] = (0.0, 0.0, 0.0)

    state_dim = 3
    control_dim = 1
    disturbance_dim = 3

    def __post_init__(self):
        if not self.speed > 0:
            raise DynamicsError(f"speed must be positive, got {self.speed}")
        if len(self.control_range) != 2 or self.control_range[0] > self.control_range[1]:
            raise DynamicsError(f"bad control range {self.control_range}")
        if len(self.dstb_min) != 3 or len(self.dstb_max) != 3:
            raise DynamicsError("disturbance box needs 3 lower and 3 upper bounds")
        if any(lo > hi for lo, hi in zip(self.dstb_min, self.dstb_max)):
            raise DynamicsError(f"bad disturbance box {self.dstb_min} .. {self.dstb_max}")

    def control_bounds(self):
        return np.array([self.control_range[0]]), np.array([self.control_range[1]])

    def disturbance_bounds(self):
        return np.array(self.dstb_min, dtype=float), np.array(self.dstb_max, dtype=float)

    def flow(self, x, u, d, t=0.0):
        x = _as_state(x, 3)
        u = _as_state(u, 1, "control")
        d = _as_state(d, 3, "disturbance")
        _check_range(u, *self.control_bounds(), "control")
        _check_range(d, *self.disturbance_bounds(), "disturbance")
        theta = x[2]
        return np.stack([
            self.speed * np.cos(theta) + d[0],
            self.speed * np.sin(theta) + d[1],
            u[0] + d[2] + 0.0 * theta,
        ])

    def opt_ctrl(self, t, x, p, mode):
        p = _as_state(p, 3, "costate")
        a_min, a_max = self.control_range
        return bang_bang(p[2], a_min, a_max, mode)[None].astype(float)

    def opt_dstb(self, t, x, p, mode):
        p = _as_state(p, 3, "costate")
        return np.stack([
            bang_bang(p[i], self.dstb_min[i], self.dstb_max[i], mode).astype(float)
            for i in range(3)
        ])

    def dissipation_bounds(self, region=None):
        dmax = np.maximum(np.abs(self.dstb_min), np.abs(self.dstb_max))
        amax = max(abs(self.control_range[0]), abs(self.control_range[1]))
        return np.array([self.speed + dmax[0], self.speed + dmax[1], amax + dmax[2]])


@dataclass(frozen=True)
class Integrator1D(System):
    """``x' = u`` with ``u`` in a closed interval; no disturbance."""

    control_range: tuple[float, float] = (-1.0, 1.0)

    state_dim = 1
    control_dim = 1
    disturbance_dim = 0

    def __post_init__(self):
        if len(self.control_range) != 2 or self.control_range[0] > self.control_range[1]:
            raise DynamicsError(f"bad control range {self.control_range}")

    def control_bounds(self):
        return np.array([self.control_range[0]]), np.array([self.control_range[1]])

    def disturbance_bounds(self):
        return np.zeros(0), np.zeros(0)

    def flow(self, x, u, d, t=0.0):
        x = _as_state(x, 1)
        u = _as_state(u, 1, "control")
        _check_range(u, *self.control_bounds(), "control")
        return u + 0.0 * x

    def opt_ctrl(self, t, x, p, mode):
        p = _as_state(p, 1, "costate")
        lo, hi = self.control_range
        return bang_bang(p[0], lo, hi, mode)[None].astype(float)

    def opt_dstb(self, t, x, p, mode):
        return self._empty(_as_state(p, 1, "costate"))

    def dissipation_bounds(self, region=None):
        return np.array([max(abs(self.control_range[0]), abs(self.control_range[1]))])


@dataclass(frozen=True)
class Advection(System):
    """Constant drift ``x' = velocity``; no inputs."""

    velocity: tuple[float, ...] = (1.0,)

    control_dim = 0
    disturbance_dim = 0

    def __post_init__(self):
        if len(self.velocity) < 1:
            raise DynamicsError("velocity needs at least one component")
        object.__setattr__(self, "velocity", tuple(float(v) for v in self.velocity))

    @property
    def state_dim(self) -> int:
        return len(self.velocity)

    def control_bounds(self):
        return np.zeros(0), np.zeros(0)

    def disturbance_bounds(self):
        return np.zeros(0), np.zeros(0)

    def flow(self, x, u, d, t=0.0):
        x = _as_state(x, self.state_dim)
        vel = np.reshape(self.velocity, (-1,) + (1,) * (x.ndim - 1))
        return vel + 0.0 * x

    def opt_ctrl(self, t, x, p, mode):
        return self._empty(_as_state(p, self.state_dim, "costate"))

    def opt_dstb(self, t, x, p, mode):
        return self._empty(_as_state(p, self.state_dim, "costate"))

    def dissipation_bounds(self, region=None):
        return np.abs(np.array(self.velocity))


def flow(sys: System, x, u, d, t=0.0):
    return sys.flow(x, u, d, t)


def opt_ctrl(sys: System, t, x, p, mode: InputMode):
    return sys.opt_ctrl(t, x, p, mode)


def opt_dstb(sys: System, t, x, p, mode: InputMode):
    return sys.opt_dstb(t, x, p, mode)


def dissipation_bounds(sys: System, region=None):
    return sys.dissipation_bounds(region)
