import io
import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_stream
from evtrack.events import Event, EventStream, Polarity, SensorGeometry
from evtrack.stream_io import (
    BadHeader, BadMagic, BadPolarityByte, MalformedLine, NonMonotonicTime, OutOfRange,
    TimestampOverflow, TruncatedRecord, load_events, read_binary, read_text, write_binary, write_text,
)

HEADER = b"EVT1" + struct.pack("<HH", 240, 180)


def test_read_text_single_event():
    s = read_text(b"geometry 240 180\n100 5 7 1\n")
    assert list(s) == [Event(5, 7, 100, Polarity.POSITIVE)]
    assert s.geometry == SensorGeometry(240, 180)


def test_read_text_accepts_file_objects():
    s = read_text(io.BytesIO(b"geometry 4 4\n1 0 0 0\n"))
    assert list(s) == [Event(0, 0, 1, Polarity.NEGATIVE)]


def test_read_text_comments_only_is_empty():
    s = read_text(b"# recorded on a desk\ngeometry 240 180\n# nothing else\n")
    assert len(s) == 0


@pytest.mark.parametrize("body,err,line", [
    (b"geometry 240 180\n100 240 7 1\n", OutOfRange, 2),
    (b"geometry 240 180\n100 5 180 1\n", OutOfRange, 2),
    (b"geometry 240 180\n100 5 7\n", MalformedLine, 2),
    (b"geometry 240 180\n100 5 seven 1\n", MalformedLine, 2),
    (b"geometry 240 180\n100 5 7 2\n", MalformedLine, 2),
    (b"# c\ngeometry 240 180\n100 5 7 1\n99 5 7 1\n", NonMonotonicTime, 4),
    (b"100 5 7 1\n", MalformedLine, 1),
    (b"geometry 240 180\n-1 5 7 1\n", OutOfRange, 2),
])
def test_read_text_errors(body, err, line):
    with pytest.raises(err) as info:
        read_text(body)
    assert info.value.position == line


def test_read_text_missing_geometry():
    with pytest.raises(MalformedLine):
        read_text(b"# only comments\n")


def test_write_empty_is_header_only():
    s = EventStream.empty()
    assert write_text(s) == b"geometry 240 180\n"
    assert write_binary(s) == HEADER


def test_write_one_event():
    s = EventStream.from_events([Event(5, 7, 100, Polarity.POSITIVE)])
    assert write_text(s) == b"geometry 240 180\n100 5 7 1\n"
    assert write_binary(s) == HEADER + struct.pack("<IHHB", 100, 5, 7, 1)


def test_binary_header_only_is_empty():
    assert len(read_binary(HEADER)) == 0


def test_binary_truncated():
    with pytest.raises(TruncatedRecord):
        read_binary(HEADER + bytes(10))


def test_binary_bad_magic():
    with pytest.raises(BadMagic):
        read_binary(b"EVT2" + HEADER[4:])
    with pytest.raises(BadMagic):
        read_binary(b"")


def test_binary_zero_geometry():
    with pytest.raises(BadHeader):
        read_binary(b"EVT1" + struct.pack("<HH", 0, 180))


def test_binary_record_errors():
    rec = lambda t, x, y, p: struct.pack("<IHHB", t, x, y, p)  # noqa: E731
    with pytest.raises(BadPolarityByte) as info:
        read_binary(HEADER + rec(1, 0, 0, 1) + rec(2, 0, 0, 2))
    assert info.value.position == 1
    with pytest.raises(OutOfRange):
        read_binary(HEADER + rec(1, 240, 0, 1))
    with pytest.raises(NonMonotonicTime) as info:
        read_binary(HEADER + rec(5, 0, 0, 1) + rec(4, 0, 0, 1))
    assert info.value.position == 1


def test_binary_timestamp_overflow():
    s = EventStream.from_events([Event(0, 0, 2**32, Polarity.POSITIVE)])
    with pytest.raises(TimestampOverflow):
        write_binary(s)
    # the text format keeps 64-bit time
    assert read_text(write_text(s)) == s


def test_binary_size_formula(rng):
    s = random_stream(rng, 123)
    assert len(write_binary(s)) == 8 + 9 * 123


def test_load_events_sniffs_format(tmp_path, rng):
    s = random_stream(rng, 20)
    (tmp_path / "a.bin").write_bytes(write_binary(s))
    (tmp_path / "a.txt").write_bytes(write_text(s))
    assert load_events(tmp_path / "a.bin") == s
    assert load_events(tmp_path / "a.txt") == s


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(0, 300),
       w=st.integers(1, 400), h=st.integers(1, 400))
def test_round_trip_property(seed, n, w, h):
    rng = np.random.default_rng(seed)
    s = random_stream(rng, n, SensorGeometry(w, h))
    assert read_binary(write_binary(s)) == s
    assert read_text(write_text(s)) == s
    assert write_binary(read_binary(write_binary(s))) == write_binary(s)
