"""Readers and writers for the two event-log interchange formats.

Text format (UTF-8)::

    # comment lines start with '#'
    geometry <width> <height>
    <t> <x> <y> <p>          # p: 0 = negative, 1 = positive

Binary format (little-endian): an 8-byte header ``b"EVT1"``, ``u16 width``,
``u16 height``, followed by packed 9-byte records ``u32 t``, ``u16 x``,
``u16 y``, ``u8 polarity``.
"""

from __future__ import annotations

import io
import struct
from typing import BinaryIO, Union

import numpy as np

from .events import U64_MAX, EventStream, SensorGeometry

MAGIC = b"EVT1"
HEADER = struct.Struct("<4sHH")
RECORD_DTYPE = np.dtype([("t", "<u4"), ("x", "<u2"), ("y", "<u2"), ("p", "u1")])
RECORD_SIZE = RECORD_DTYPE.itemsize  # 9, unpadded
U32_MAX = 2**32 - 1

Source = Union[bytes, bytearray, memoryview, BinaryIO]


class StreamFormatError(ValueError):
    """Base class for event-log decoding errors.

    ``position`` is a 1-based line number for text input and a 0-based
    record index for binary input (None when not tied to a record).
    """

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message if position is None else f"{message} (at {position})")
        self.position = position


class MalformedLine(StreamFormatError):
    pass


class OutOfRange(StreamFormatError):
    pass


class NonMonotonicTime(StreamFormatError):
    pass


class BadMagic(StreamFormatError):
    pass


class BadHeader(StreamFormatError):
    pass


class TruncatedRecord(StreamFormatError):
    pass


class BadPolarityByte(StreamFormatError):
    pass


class TimestampOverflow(StreamFormatError):
    pass


def _read_all(source: Source) -> bytes:
    if isinstance(source, (bytes, bytearray, memoryview)):
        return bytes(source)
    return source.read()


# ---------------------------------------------------------------- text

def _parse_int(token: str, lineno: int) -> int:
    try:
        return int(token, 10)
    except ValueError:
        raise MalformedLine(f"non-integer token {token!r}", lineno) from None


def read_text(source: Source) -> EventStream:
    """Parse the text event format; line order defines event order."""
    text = _read_all(source).decode("utf-8")
    geometry = None
    ts, xs, ys, ps = [], [], [], []
    last_t = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if geometry is None:
            if len(fields) != 3 or fields[0] != "geometry":
                raise MalformedLine("expected 'geometry <width> <height>'", lineno)
            w, h = _parse_int(fields[1], lineno), _parse_int(fields[2], lineno)
            try:
                geometry = SensorGeometry(w, h)
            except ValueError as exc:
                raise OutOfRange(str(exc), lineno) from None
            continue
        if len(fields) != 4:
            raise MalformedLine(f"expected 4 fields, got {len(fields)}", lineno)
        t, x, y, p = (_parse_int(f, lineno) for f in fields)
        if p not in (0, 1):
            raise MalformedLine(f"polarity must be 0 or 1, got {p}", lineno)
        if not 0 <= t <= U64_MAX:
            raise OutOfRange(f"timestamp {t} outside unsigned 64-bit range", lineno)
        if not geometry.contains(x, y):
            raise OutOfRange(f"pixel ({x}, {y}) outside {geometry.width}x{geometry.height}", lineno)
        if t < last_t:
            raise NonMonotonicTime(f"timestamp {t} precedes {last_t}", lineno)
        last_t = t
        ts.append(t)
        xs.append(x)
        ys.append(y)
        ps.append(p)
    if geometry is None:
        raise MalformedLine("missing geometry line", None)
    return EventStream(
        geometry,
        np.array(xs, dtype=np.uint16),
        np.array(ys, dtype=np.uint16),
        np.array(ts, dtype=np.uint64),
        np.array(ps, dtype=np.uint8),
    )


def write_text(stream: EventStream) -> bytes:
    out = io.StringIO()
    g = stream.geometry
    out.write(f"geometry {g.width} {g.height}\n")
    for t, x, y, p in zip(stream.t.tolist(), stream.x.tolist(), stream.y.tolist(), stream.p.tolist()):
        out.write(f"{t} {x} {y} {p}\n")
    return out.getvalue().encode("utf-8")


# ---------------------------------------------------------------- binary

def read_binary(source: Source) -> EventStream:
    """Decode the binary event format, validating every record."""
    data = _read_all(source)
    if len(data) < len(MAGIC) or data[: len(MAGIC)] != MAGIC:
        raise BadMagic(f"expected magic {MAGIC!r}, got {bytes(data[:4])!r}")
    if len(data) < HEADER.size:
        raise BadHeader("header truncated")
    _, width, height = HEADER.unpack_from(data)
    if width == 0 or height == 0:
        raise BadHeader(f"zero sensor dimension {width}x{height}")
    geometry = SensorGeometry(width, height)

    body = memoryview(data)[HEADER.size:]
    if len(body) % RECORD_SIZE:
        raise TruncatedRecord(
            f"{len(body)} payload bytes is not a multiple of {RECORD_SIZE}", len(body) // RECORD_SIZE
        )
    rec = np.frombuffer(body, dtype=RECORD_DTYPE)

    bad = np.flatnonzero(rec["p"] > 1)
    if bad.size:
        raise BadPolarityByte(f"polarity byte {rec['p'][bad[0]]}", int(bad[0]))
    bad = np.flatnonzero((rec["x"] >= width) | (rec["y"] >= height))
    if bad.size:
        i = int(bad[0])
        raise OutOfRange(f"pixel ({rec['x'][i]}, {rec['y'][i]}) outside {width}x{height}", i)
    bad = np.flatnonzero(rec["t"][1:] < rec["t"][:-1])
    if bad.size:
        raise NonMonotonicTime("timestamp decreases", int(bad[0]) + 1)

    return EventStream(geometry, rec["x"], rec["y"], rec["t"].astype(np.uint64), rec["p"])


def write_binary(stream: EventStream) -> bytes:
    if len(stream) and int(stream.t.max()) > U32_MAX:
        i = int(np.argmax(stream.t > U32_MAX))
        raise TimestampOverflow("timestamp does not fit in 32 bits", i)
    g = stream.geometry
    rec = np.empty(len(stream), dtype=RECORD_DTYPE)
    rec["t"] = stream.t
    rec["x"] = stream.x
    rec["y"] = stream.y
    rec["p"] = stream.p
    return HEADER.pack(MAGIC, g.width, g.height) + rec.tobytes()


# ---------------------------------------------------------------- paths

def load_events(path) -> EventStream:
    """Read an event file, choosing the format from its leading bytes."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] == MAGIC:
        return read_binary(data)
    return read_text(data)


def encode_events(stream: EventStream, binary: bool) -> bytes:
    return write_binary(stream) if binary else write_text(stream)
