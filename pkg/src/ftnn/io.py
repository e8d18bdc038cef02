"""Binary tensor/mask files and CSV output.

T3B layout (little-endian)::

    b"FT3B" | u16 version=1 | u16 reserved=0 | u64 n1 | u64 n2 | u64 n3
    | n1*n2*n3 float64, i fastest, then j, then k

Mask layout::

    b"FTMK" | u16 version=1 | u16 reserved=0 | u64 n1 | u64 n2 | u64 n3
    | u64 count | count u64 strictly increasing offsets

Every writer goes through a temporary file in the target directory and an
atomic rename.
"""

from __future__ import annotations

import csv
import io
import os
import struct
import tempfile
import zlib
from pathlib import Path

import numpy as np

from ftnn.tensor import Mask

T3B_MAGIC = b"FT3B"
MASK_MAGIC = b"FTMK"
VERSION = 1
_HEADER = struct.Struct("<4sHH3Q")


class FormatError(ValueError):
    """Raised when a file does not follow the expected layout."""


def atomic_write_bytes(path, payload):
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def encode_t3b(x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3:
        raise FormatError("T3B stores third-order tensors only")
    head = _HEADER.pack(T3B_MAGIC, VERSION, 0, *x.shape)
    return head + x.ravel(order="F").astype("<f8").tobytes()


def _parse_header(raw, magic, what):
    if len(raw) < _HEADER.size:
        raise FormatError(f"{what}: truncated header")
    got, version, _reserved, n1, n2, n3 = _HEADER.unpack_from(raw)
    if got != magic:
        raise FormatError(f"{what}: bad magic {got!r}")
    if version != VERSION:
        raise FormatError(f"{what}: unsupported version {version}")
    return n1, n2, n3


def decode_t3b(raw):
    n1, n2, n3 = _parse_header(raw, T3B_MAGIC, "T3B")
    count = n1 * n2 * n3
    if len(raw) != _HEADER.size + 8 * count:
        raise FormatError(f"T3B: payload is {len(raw) - _HEADER.size} bytes, expected {8 * count}")
    data = np.frombuffer(raw, dtype="<f8", count=count, offset=_HEADER.size)
    return data.astype(np.float64).reshape((n1, n2, n3), order="F")


def encode_mask(mask):
    head = _HEADER.pack(MASK_MAGIC, VERSION, 0, *mask.shape)
    idx = np.asarray(mask.indices, dtype="<u8")
    return head + struct.pack("<Q", idx.size) + idx.tobytes()


def decode_mask(raw):
    shape = _parse_header(raw, MASK_MAGIC, "mask")
    if len(raw) < _HEADER.size + 8:
        raise FormatError("mask: missing count")
    (count,) = struct.unpack_from("<Q", raw, _HEADER.size)
    start = _HEADER.size + 8
    if len(raw) != start + 8 * count:
        raise FormatError(f"mask: expected {count} offsets")
    idx = np.frombuffer(raw, dtype="<u8", count=count, offset=start).astype(np.int64)
    try:
        return Mask(shape, idx)
    except ValueError as exc:
        raise FormatError(f"mask: {exc}") from None


def write_t3b(path, x):
    atomic_write_bytes(path, encode_t3b(x))


def read_t3b(path):
    return decode_t3b(Path(path).read_bytes())


def write_mask(path, mask):
    atomic_write_bytes(path, encode_mask(mask))


def read_mask(path):
    return decode_mask(Path(path).read_bytes())


def checksum(payload):
    """CRC-32 of encoded file bytes, as 8 hex digits."""
    return f"{zlib.crc32(payload) & 0xFFFFFFFF:08x}"


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value


def encode_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue().encode("utf-8")


def write_csv(path, rows):
    atomic_write_bytes(path, encode_csv(rows))


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def matrix_rows(m):
    """A dense matrix as CSV rows (no header)."""
    return [[float(v) for v in row] for row in np.asarray(m)]
