"""
Brute-force dynamic-programming reachability oracle.

Semi-Lagrangian value iteration on a coarse grid:

    W_0 = l,
    W_{k+1}(x) = opt_u opt_d W_k(x + dt f(x, u, d)),

with the inner optimization over the disturbance (it sees the control),
multilinear interpolation off-grid, and a running ``min(W, l)`` for tubes.
This shares no code with the PDE scheme beyond interpolation, so it can be
used as an independent check of the solver.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .dynamics import InputMode, System
from .errors import GridError
from .grid import Grid, ValueField, interpolate_array

OUT_OF_BOUNDS = 1e9
MAX_NODES = 200_000


@dataclass(frozen=True)
class OracleConfig:
    grid: Grid
    sys: System
    dt: float
    steps: int
    control_samples: int = 2
    dstb_samples: int = 2
    u_mode: InputMode = InputMode.MIN
    d_mode: InputMode = InputMode.MAX
    tube: bool = True

    def __post_init__(self):
        if self.grid.size > MAX_NODES:
            raise GridError(f"oracle grid has {self.grid.size} nodes, limit is {MAX_NODES}")
        if self.control_samples < 2 or self.dstb_samples < 2:
            raise ValueError("need at least 2 samples per input dimension (endpoints)")
        if self.steps < 0 or not self.dt > 0:
            raise ValueError("need dt > 0 and steps >= 0")

    @property
    def horizon(self) -> float:
        return self.dt * self.steps


def _samples(lo, hi, n):
    if len(lo) == 0:
        return [np.zeros(0)]
    axes = [np.linspace(a, b, n) for a, b in zip(lo, hi)]
    return [np.array(c) for c in itertools.product(*axes)]


def _opt(a, b, mode):
    return np.minimum(a, b) if mode is InputMode.MIN else np.maximum(a, b)


def oracle_value(cfg: OracleConfig, target: ValueField) -> ValueField:
    grid = cfg.grid
    if target.grid != grid:
        raise GridError("target is not on the oracle grid")
    sys = cfg.sys
    x = grid.points()
    xt = x.T
    ones = np.ones(x.shape[0])
    us = _samples(*sys.control_bounds(), cfg.control_samples)
    ds = _samples(*sys.disturbance_bounds(), cfg.dstb_samples)

    # Successor states are the same every step; compute them once.
    succ = []
    for u in us:
        row = []
        for d in ds:
            f = sys.flow(xt, u[:, None] * ones, d[:, None] * ones)
            row.append(grid.wrap((xt + cfg.dt * f).T))
        succ.append(row)

    l = target.values.reshape(-1)
    w = l.copy()
    for _ in range(cfg.steps):
        best = None
        for row in succ:
            inner = None
            for y in row:
                val = interpolate_array(w.reshape(grid.shape), grid, y, fill=OUT_OF_BOUNDS)
                inner = val if inner is None else _opt(inner, val, cfg.d_mode)
            best = inner if best is None else _opt(best, inner, cfg.u_mode)
        w = np.minimum(best, l) if cfg.tube else best
    return ValueField(grid, w)
