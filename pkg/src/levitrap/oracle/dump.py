"""Raw impulse-stream dump.

Little-endian binary: a 16-byte header (4-byte magic ``LVTR``, uint32
version, uint64 record count) followed by records of four float64 values
(time in s, impulse along x, y, z in N·s).
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import ValidationError

MAGIC = b"LVTR"
VERSION = 1
HEADER = struct.Struct("<4sIQ")
RECORD = np.dtype([("time", "<f8"), ("impulse", "<f8", (3,))])


def write_dump(path, times, impulses):
    times = np.asarray(times, dtype=float)
    impulses = np.asarray(impulses, dtype=float).reshape(-1, 3)
    if times.shape[0] != impulses.shape[0]:
        raise ValidationError("times and impulses differ in length")
    rec = np.empty(times.size, dtype=RECORD)
    rec["time"] = times
    rec["impulse"] = impulses
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, VERSION, times.size))
        fh.write(rec.tobytes())


def read_dump(path):
    """Return (times, impulses) from a dump file."""
    raw = Path(path).read_bytes()
    if len(raw) < HEADER.size:
        raise ValidationError("dump too short for its header")
    magic, version, count = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValidationError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ValidationError(f"unsupported dump version {version}")
    body = raw[HEADER.size:]
    if len(body) != count * RECORD.itemsize:
        raise ValidationError("record count does not match file size")
    rec = np.frombuffer(body, dtype=RECORD)
    return rec["time"].copy(), rec["impulse"].copy()
