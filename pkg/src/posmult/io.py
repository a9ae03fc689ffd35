"""Binary and CSV persistence for grid fields.

The binary container is a 28-byte little-endian header

    b"MPLB" | version u32 | n u32 | m u32 | N u32 | L f64

followed by the m components in row-major order as interleaved f64 (re, im).
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .engine import GridField, GridSpec

MAGIC = b"MPLB"
VERSION = 1
_HEADER = struct.Struct("<4sIIIId")


def field_to_bytes(f: GridField) -> bytes:
    head = _HEADER.pack(MAGIC, VERSION, f.spec.n, f.m, f.spec.N, f.spec.L)
    return head + np.ascontiguousarray(f.data, dtype="<c16").tobytes()


def field_from_bytes(buf: bytes) -> GridField:
    if len(buf) < _HEADER.size:
        raise ValueError("buffer is shorter than the MPLB header")
    magic, version, n, m, N, L = _HEADER.unpack_from(buf)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"unsupported MPLB version {version}")
    spec = GridSpec(n, N, L)
    count = m * N ** n
    body = buf[_HEADER.size:]
    if len(body) != 16 * count:
        raise ValueError(f"expected {16 * count} payload bytes, found {len(body)}")
    data = np.frombuffer(body, dtype="<c16").reshape((m,) + spec.shape)
    return GridField(spec, data.astype(complex))


def write_field(path, f: GridField) -> None:
    Path(path).write_bytes(field_to_bytes(f))


def read_field(path) -> GridField:
    return field_from_bytes(Path(path).read_bytes())


def write_csv_slice(path, f: GridField, index: tuple[int, ...] = ()) -> None:
    """Write a 1-D slice with columns x, re_0, im_0, re_1, im_1, ...

    For n > 1 the slice runs along the first axis; ``index`` fixes the remaining
    axes (default: the grid centre).
    """
    spec = f.spec
    if not index:
        index = (spec.N // 2,) * (spec.n - 1)
    if len(index) != spec.n - 1:
        raise ValueError(f"need {spec.n - 1} fixed indices for an n={spec.n} grid")
    rows = f.data[(slice(None), slice(None)) + tuple(index)]
    header = ["x"]
    for j in range(f.m):
        header += [f"re_{j}", f"im_{j}"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i, x in enumerate(spec.axis()):
            row = [repr(float(x))]
            for j in range(f.m):
                row += [repr(float(rows[j, i].real)), repr(float(rows[j, i].imag))]
            w.writerow(row)
