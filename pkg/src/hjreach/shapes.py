"""Implicit-surface constructors and level-set set algebra.

Every shape is negative inside, zero on the boundary and positive outside.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import GridError
from .grid import Grid, ValueField


def shape_sphere(grid: Grid, center: Sequence[float], radius: float) -> ValueField:
    """Euclidean distance to ``center`` minus ``radius``."""
    return shape_cylinder(grid, (), center, radius)


def shape_cylinder(grid: Grid, ignore_dims: Iterable[int], center: Sequence[float],
                   radius: float) -> ValueField:
    """Sphere in the kept dimensions, constant along ``ignore_dims``.

    ``center`` lists coordinates for the kept dimensions only, in order.
    """
    ignore = sorted(set(int(i) for i in ignore_dims))
    if any(not 0 <= i < grid.dim_count for i in ignore) or len(ignore) >= grid.dim_count:
        raise GridError(f"invalid ignore_dims {ignore} for a {grid.dim_count}-D grid")
    kept = [i for i in range(grid.dim_count) if i not in ignore]
    center = np.asarray(center, dtype=float).ravel()
    if center.size != len(kept):
        raise GridError(f"center has {center.size} entries, expected {len(kept)}")
    if not radius > 0:
        raise GridError(f"radius must be positive, got {radius}")
    mesh = grid.mesh()
    sq = np.zeros(grid.shape)
    for c, i in zip(center, kept):
        sq = sq + (mesh[i] - c) ** 2
    return ValueField(grid, np.sqrt(sq) - radius)


def shape_rectangle(grid: Grid, lower: Sequence[float], upper: Sequence[float]) -> ValueField:
    """Axis-aligned box as the max over faces of the signed face distance.

    Same zero level set as the true signed distance, and 1-Lipschitz.
    """
    lower = np.asarray(lower, dtype=float).ravel()
    upper = np.asarray(upper, dtype=float).ravel()
    if lower.size != grid.dim_count or upper.size != grid.dim_count:
        raise GridError(f"box bounds must have {grid.dim_count} entries")
    if not np.all(lower < upper):
        raise GridError(f"empty box: lower {lower.tolist()} not below upper {upper.tolist()}")
    mesh = grid.mesh()
    out = np.full(grid.shape, -np.inf)
    for i in range(grid.dim_count):
        out = np.maximum(out, np.maximum(lower[i] - mesh[i], mesh[i] - upper[i]))
    return ValueField(grid, out)


def field_union(a: ValueField, b: ValueField) -> ValueField:
    a.same_grid(b)
    return ValueField(a.grid, np.minimum(a.values, b.values))


def field_intersection(a: ValueField, b: ValueField) -> ValueField:
    a.same_grid(b)
    return ValueField(a.grid, np.maximum(a.values, b.values))


def field_complement(a: ValueField) -> ValueField:
    return ValueField(a.grid, -a.values)
