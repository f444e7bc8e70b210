"""
HJRF binary field files.

Little-endian layout::

    b"HJRF"  u32 version (=1)  u32 dim_count
    per dim:  u64 count  f64 min  f64 max  u8 periodic
    u64 tau_count
    per tau:  f64 tau  then prod(counts) f64 values, last dim fastest
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import FieldFormatError, GridError
from .grid import ValueField, create_grid
from .solver import SolveResult

MAGIC = b"HJRF"
VERSION = 1
_DIM = struct.Struct("<QddB")


def write_field_file(result: SolveResult, path) -> None:
    grid = result.grid
    parts = [MAGIC, struct.pack("<II", VERSION, grid.dim_count)]
    for n, lo, hi, per in zip(grid.counts, grid.mins, grid.maxs, grid.periodic):
        parts.append(_DIM.pack(n, lo, hi, int(per)))
    parts.append(struct.pack("<Q", len(result.tau)))
    for tau, fld in zip(result.tau, result.fields):
        parts.append(struct.pack("<d", float(tau)))
        parts.append(np.ascontiguousarray(fld.values, dtype="<f8").tobytes())
    Path(path).write_bytes(b"".join(parts))


def read_field_file(path) -> SolveResult:
    data = Path(path).read_bytes()
    if len(data) < 12:
        raise FieldFormatError("truncated header")
    if data[:4] != MAGIC:
        raise FieldFormatError(f"bad magic {data[:4]!r}, expected {MAGIC!r}")
    version, ndim = struct.unpack_from("<II", data, 4)
    if version != VERSION:
        raise FieldFormatError(f"unsupported version {version}")
    if ndim < 1:
        raise FieldFormatError("dim_count must be at least 1")
    off = 12
    if len(data) < off + ndim * _DIM.size + 8:
        raise FieldFormatError("truncated header")
    counts, mins, maxs, periodic = [], [], [], []
    for _ in range(ndim):
        n, lo, hi, per = _DIM.unpack_from(data, off)
        off += _DIM.size
        counts.append(n)
        mins.append(lo)
        maxs.append(hi)
        periodic.append(bool(per))
    (ntau,) = struct.unpack_from("<Q", data, off)
    off += 8
    try:
        grid = create_grid(mins, maxs, counts, periodic)
    except GridError as exc:
        raise FieldFormatError(f"invalid grid header: {exc}") from exc
    block = 8 + 8 * grid.size
    if len(data) - off != ntau * block:
        raise FieldFormatError(
            f"payload is {len(data) - off} bytes, header implies {ntau} x {block}"
        )
    taus, fields = [], []
    for _ in range(ntau):
        (tau,) = struct.unpack_from("<d", data, off)
        off += 8
        vals = np.frombuffer(data, dtype="<f8", count=grid.size, offset=off)
        off += 8 * grid.size
        taus.append(tau)
        fields.append(ValueField(grid, vals.astype(np.float64)))
    return SolveResult(np.array(taus), fields, None)
