"""
Marching-squares level curves on 2-D slices of a value field.

A slice keeps two free dimensions and fixes every other coordinate; the
field is multilinearly interpolated onto the free-dimension nodes. A free
periodic dimension gets its wrap cell so closed curves stay closed.
Saddle cells are split according to the sign of the cell-center average.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridError
from .grid import Grid, ValueField, interpolate_array


@dataclass(frozen=True)
class SliceSpec:
    free_dims: tuple[int, int] = (0, 1)
    fixed: dict = field(default_factory=dict)

    def resolve(self, grid: Grid) -> dict[int, float]:
        """Validate against ``grid``; returns the fixed coordinate for every other dim.

        Dims not listed in ``fixed`` are pinned at the middle of their range.
        """
        a, b = self.free_dims
        n = grid.dim_count
        if len(self.free_dims) != 2 or a == b or not (0 <= a < n and 0 <= b < n):
            raise GridError(f"slice needs two distinct free dims in [0, {n}), got {self.free_dims}")
        out = {}
        for d, c in self.fixed.items():
            d = int(d)
            if d in (a, b) or not 0 <= d < n:
                raise GridError(f"cannot fix dim {d} in this slice")
            lo, hi = grid.mins[d], grid.maxs[d]
            if not grid.periodic[d] and not lo <= c <= hi:
                raise GridError(f"fixed coordinate {c} for dim {d} outside [{lo}, {hi}]")
            out[d] = float(c)
        for d in range(n):
            if d not in (a, b) and d not in out:
                out[d] = 0.5 * (grid.mins[d] + grid.maxs[d])
        return out


def slice_values(fld: ValueField, spec: SliceSpec):
    """Return ``(xs, ys, A)`` with ``A[i, j]`` the field at ``(xs[i], ys[j])``."""
    grid = fld.grid
    fixed = spec.resolve(grid)
    a, b = spec.free_dims
    xs, ys = grid.axes[a], grid.axes[b]
    if grid.periodic[a]:
        xs = np.append(xs, grid.maxs[a])
    if grid.periodic[b]:
        ys = np.append(ys, grid.maxs[b])
    pts = np.empty((xs.size * ys.size, grid.dim_count))
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts[:, a] = X.ravel()
    pts[:, b] = Y.ravel()
    for d, c in fixed.items():
        pts[:, d] = c
    vals = interpolate_array(fld.values, grid, pts).reshape(xs.size, ys.size)
    return xs, ys, vals


def marching_squares(xs, ys, A, level: float) -> list[np.ndarray]:
    """Polylines of ``A == level``; closed polylines repeat their first vertex."""
    above = A > level
    nx, ny = A.shape
    verts: dict[tuple, tuple[float, float]] = {}

    def vertex(key):
        if key not in verts:
            kind, i, j = key
            if kind == "h":  # (i, j) -> (i + 1, j)
                v0, v1 = A[i, j], A[i + 1, j]
                s = (level - v0) / (v1 - v0)
                verts[key] = (xs[i] + s * (xs[i + 1] - xs[i]), ys[j])
            else:  # (i, j) -> (i, j + 1)
                v0, v1 = A[i, j], A[i, j + 1]
                s = (level - v0) / (v1 - v0)
                verts[key] = (xs[i], ys[j] + s * (ys[j + 1] - ys[j]))
        return key

    adj: dict[tuple, list[tuple]] = {}

    def link(e, f):
        adj.setdefault(vertex(e), []).append(vertex(f))
        adj.setdefault(f, []).append(e)

    for i in range(nx - 1):
        for j in range(ny - 1):
            c = (above[i, j], above[i + 1, j], above[i + 1, j + 1], above[i, j + 1])
            if all(c) or not any(c):
                continue
            e = (("h", i, j), ("v", i + 1, j), ("h", i, j + 1), ("v", i, j))
            crossed = [c[k] != c[(k + 1) % 4] for k in range(4)]
            if all(crossed):
                center = 0.25 * (A[i, j] + A[i + 1, j] + A[i + 1, j + 1] + A[i, j + 1])
                if (center > level) == c[0]:
                    # corners 0 and 2 join through the center; cut off 1 and 3
                    link(e[0], e[1])
                    link(e[2], e[3])
                else:
                    link(e[3], e[0])
                    link(e[1], e[2])
            else:
                a, b = (e[k] for k in range(4) if crossed[k])
                link(a, b)

    lines = []
    seen = set()
    # start open chains at their ends first, then sweep closed loops
    starts = sorted(k for k, n in adj.items() if len(n) == 1) + sorted(adj)
    for s in starts:
        if s in seen:
            continue
        chain = [s]
        seen.add(s)
        prev, cur = None, s
        while True:
            nxt = [n for n in adj[cur] if n != prev and n not in seen]
            if not nxt:
                if len(chain) > 2 and s in adj[cur] and cur != s:
                    chain.append(s)
                break
            prev, cur = cur, nxt[0]
            chain.append(cur)
            seen.add(cur)
        pts = [verts[chain[0]]]
        for k in chain[1:]:
            if verts[k] != pts[-1]:
                pts.append(verts[k])
        lines.append(np.array(pts))
    return lines


def extract_contours(fld: ValueField, spec: SliceSpec, level: float = 0.0) -> list[np.ndarray]:
    xs, ys, A = slice_values(fld, spec)
    return marching_squares(xs, ys, A, level)
