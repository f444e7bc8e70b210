"""
Rectangular state-space grids and scalar fields sampled on them.

Non-periodic dimensions place ``counts[i]`` nodes from ``mins[i]`` to
``maxs[i]`` inclusive. Periodic dimensions exclude the top endpoint, which
is identified with ``mins[i]``, so ``counts[i] * spacings[i]`` spans one
period exactly.

Field values are stored as C-ordered arrays of shape ``grid.counts``
(last dimension varies fastest).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, GridError

# Fractional index offsets below this snap to the node, so queries at
# node coordinates reproduce stored values bit for bit.
_SNAP = 1e-10


@dataclass(frozen=True)
class Grid:
    mins: tuple[float, ...]
    maxs: tuple[float, ...]
    counts: tuple[int, ...]
    periodic: tuple[bool, ...]

    def __post_init__(self):
        n = len(self.mins)
        if n < 1 or not (len(self.maxs) == len(self.counts) == len(self.periodic) == n):
            raise GridError(
                "mins, maxs, counts and periodic must have the same length >= 1, got "
                f"{len(self.mins)}, {len(self.maxs)}, {len(self.counts)}, {len(self.periodic)}"
            )
        for i in range(n):
            if not (np.isfinite(self.mins[i]) and np.isfinite(self.maxs[i])):
                raise GridError(f"dim {i}: bounds must be finite")
            if not self.maxs[i] > self.mins[i]:
                raise GridError(f"dim {i}: degenerate extent, max {self.maxs[i]} <= min {self.mins[i]}")
            if self.counts[i] < 3:
                raise GridError(f"dim {i}: need at least 3 nodes, got {self.counts[i]}")
        total = 1
        for c in self.counts:
            total *= c
        if total > np.iinfo(np.intp).max:
            raise GridError(f"grid has {total} nodes, beyond the addressable range")

    @property
    def dim_count(self) -> int:
        return len(self.counts)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.counts

    @property
    def size(self) -> int:
        return int(np.prod(self.counts, dtype=np.int64))

    @property
    def spacings(self) -> tuple[float, ...]:
        return tuple(
            (hi - lo) / (n if per else n - 1)
            for lo, hi, n, per in zip(self.mins, self.maxs, self.counts, self.periodic)
        )

    @property
    def axes(self) -> tuple[np.ndarray, ...]:
        """Node coordinates along each dimension."""
        return tuple(
            lo + np.arange(n) * h
            for lo, n, h in zip(self.mins, self.counts, self.spacings)
        )

    def mesh(self) -> list[np.ndarray]:
        """Sparse, broadcastable coordinate arrays (one per dim)."""
        return np.meshgrid(*self.axes, indexing="ij", sparse=True)

    def points(self) -> np.ndarray:
        """All node coordinates as an ``(size, dim_count)`` array, row-major."""
        full = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([c.ravel() for c in full], axis=-1)

    def wrap(self, x) -> np.ndarray:
        """Map periodic coordinates of ``x`` (shape ``(..., dim_count)``) into ``[min, max)``."""
        x = np.array(x, dtype=float)
        for i in range(self.dim_count):
            if self.periodic[i]:
                lo, period = self.mins[i], self.maxs[i] - self.mins[i]
                xi = lo + np.mod(x[..., i] - lo, period)
                # np.mod can round up to exactly one period
                x[..., i] = np.where(xi >= self.maxs[i], lo, xi)
        return x

    def contains(self, x) -> np.ndarray:
        """True where every non-periodic coordinate lies within bounds."""
        x = np.asarray(x, dtype=float)
        ok = np.ones(x.shape[:-1], dtype=bool)
        for i in range(self.dim_count):
            if not self.periodic[i]:
                tol = 1e-12 * (self.maxs[i] - self.mins[i])
                ok &= (x[..., i] >= self.mins[i] - tol) & (x[..., i] <= self.maxs[i] + tol)
        return ok


def create_grid(mins: Sequence[float], maxs: Sequence[float], counts: Sequence[int],
                periodic: Sequence[bool] | None = None) -> Grid:
    if periodic is None:
        periodic = [False] * len(counts)
    if not (len(mins) == len(maxs) == len(counts) == len(periodic)):
        raise GridError(
            f"dimension mismatch: {len(mins)} mins, {len(maxs)} maxs, "
            f"{len(counts)} counts, {len(periodic)} periodic flags"
        )
    return Grid(
        tuple(float(v) for v in mins),
        tuple(float(v) for v in maxs),
        tuple(int(v) for v in counts),
        tuple(bool(v) for v in periodic),
    )


def state_at(grid: Grid, idx: Sequence[int]) -> np.ndarray:
    if len(idx) != grid.dim_count:
        raise DomainError(f"index has {len(idx)} entries, grid has {grid.dim_count} dims")
    out = np.empty(grid.dim_count)
    for i, (k, n, lo, h) in enumerate(zip(idx, grid.counts, grid.mins, grid.spacings)):
        if not 0 <= k < n:
            raise DomainError(f"index {k} out of range [0, {n}) in dim {i}")
        out[i] = lo + k * h
    return out


@dataclass(frozen=True, eq=False)
class ValueField:
    """Scalar values on every node of a grid.

    The array is copied on construction and made read-only.
    """

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64, order="C")
        if v.size != self.grid.size:
            raise GridError(f"field has {v.size} values, grid has {self.grid.size} nodes")
        v = v.reshape(self.grid.shape)
        if not np.all(np.isfinite(v)):
            raise GridError("field contains non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def same_grid(self, other: "ValueField") -> None:
        if self.grid != other.grid:
            raise GridError("fields live on different grids")


def _one_sided(v: np.ndarray, grid: Grid, dim: int) -> tuple[np.ndarray, np.ndarray]:
    h = grid.spacings[dim]
    if grid.periodic[dim]:
        lo = np.roll(v, 1, axis=dim)
        hi = np.roll(v, -1, axis=dim)
    else:
        v = np.moveaxis(v, dim, 0)
        ghost_lo = 2.0 * v[:1] - v[1:2]
        ghost_hi = 2.0 * v[-1:] - v[-2:-1]
        lo = np.moveaxis(np.concatenate([ghost_lo, v[:-1]], axis=0), 0, dim)
        hi = np.moveaxis(np.concatenate([v[1:], ghost_hi], axis=0), 0, dim)
        v = np.moveaxis(v, 0, dim)
    return (v - lo) / h, (hi - v) / h


def upwind_first_derivatives(field: ValueField, dim: int) -> tuple[ValueField, ValueField]:
    """First-order left and right differences of ``field`` along ``dim``.

    Periodic dimensions wrap. Non-periodic edges use a linearly
    extrapolated ghost node (``V[-1] = 2 V[0] - V[1]``), so affine fields
    are differentiated exactly everywhere.
    """
    if not 0 <= dim < field.grid.dim_count:
        raise GridError(f"invalid dim {dim} for a {field.grid.dim_count}-D grid")
    left, right = _one_sided(field.values, field.grid, dim)
    return ValueField(field.grid, left), ValueField(field.grid, right)


def central_gradient(v: np.ndarray, grid: Grid) -> list[np.ndarray]:
    """Central differences per dim; periodic wrap, one-sided at non-periodic edges."""
    out = []
    for d, h in enumerate(grid.spacings):
        if grid.periodic[d]:
            out.append((np.roll(v, -1, axis=d) - np.roll(v, 1, axis=d)) / (2.0 * h))
        else:
            out.append(np.gradient(v, h, axis=d, edge_order=1))
    return out


def _cell_coords(grid: Grid, x: np.ndarray):
    """Lower-corner indices, upper-corner indices and weights per dim."""
    lo_idx, hi_idx, weights = [], [], []
    for i in range(grid.dim_count):
        n, h = grid.counts[i], grid.spacings[i]
        f = (x[:, i] - grid.mins[i]) / h
        r = np.rint(f)
        f = np.where(np.abs(f - r) < _SNAP, r, f)
        if grid.periodic[i]:
            f = np.mod(f, n)
            i0 = np.minimum(np.floor(f), n - 1).astype(np.intp)
            w = f - i0
            i1 = (i0 + 1) % n
        else:
            f = np.clip(f, 0.0, n - 1)
            i0 = np.minimum(np.floor(f), n - 2).astype(np.intp)
            w = f - i0
            i1 = i0 + 1
        lo_idx.append(i0)
        hi_idx.append(i1)
        weights.append(w)
    return lo_idx, hi_idx, weights


def interpolate_array(values: np.ndarray, grid: Grid, points, fill: float | None = None) -> np.ndarray:
    """Multilinear interpolation of a raw value array at many points.

    Parameters
    ----------
    values : ndarray
        Array of shape ``grid.shape``.
    points : array_like, shape (m, dim_count)
    fill : float, optional
        Value returned for points outside the non-periodic bounds. If
        omitted such points raise :class:`DomainError`.
    """
    x = np.atleast_2d(np.asarray(points, dtype=float))
    if x.shape[-1] != grid.dim_count:
        raise DomainError(f"points have {x.shape[-1]} coordinates, grid has {grid.dim_count} dims")
    inside = grid.contains(x)
    if not np.all(inside):
        if fill is None:
            bad = x[~inside][0]
            raise DomainError(f"point {bad.tolist()} lies outside the grid")
    lo_idx, hi_idx, weights = _cell_coords(grid, x)
    out = np.zeros(x.shape[0])
    for corner in itertools.product((0, 1), repeat=grid.dim_count):
        idx = tuple(hi_idx[i] if c else lo_idx[i] for i, c in enumerate(corner))
        w = np.ones(x.shape[0])
        for i, c in enumerate(corner):
            w = w * (weights[i] if c else 1.0 - weights[i])
        out += w * values[idx]
    if fill is not None:
        out[~inside] = fill
    return out


def interpolate_points(field: ValueField, points, fill: float | None = None) -> np.ndarray:
    return interpolate_array(field.values, field.grid, points, fill)


def interpolate(field: ValueField, x) -> float:
    """Multilinear interpolation of ``field`` at a single state ``x``."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DomainError("interpolate expects a single state vector")
    return float(interpolate_array(field.values, field.grid, x[None, :])[0])
