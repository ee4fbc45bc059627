import numpy as np
import pytest
from hypothesis import given, strategies as st

from evtrack.events import Event, EventStream, Polarity, SensorGeometry, validate_stream


def stream_of(*events, geometry=SensorGeometry()):
    return EventStream.from_events([Event(*e) for e in events], geometry)


def test_default_geometry_is_davis240():
    g = SensorGeometry()
    assert (g.width, g.height) == (240, 180)


@pytest.mark.parametrize("w,h", [(0, 180), (240, 0), (-1, 5)])
def test_geometry_rejects_empty(w, h):
    with pytest.raises(ValueError):
        SensorGeometry(w, h)


def test_event_rejects_negative_time():
    with pytest.raises(ValueError):
        Event(1, 1, -1, Polarity.POSITIVE)


def test_empty_stream_ok():
    assert validate_stream(EventStream.empty()).ok


def test_equal_timestamps_ok():
    assert validate_stream(stream_of((1, 1, 5, 1), (2, 2, 5, 0))).ok


def test_decreasing_time_reported_at_index_1():
    report = validate_stream(stream_of((1, 1, 10, 1), (2, 2, 9, 0)))
    assert not report.ok
    assert report.indices == [1]


def test_bounds_are_closed_open():
    g = SensorGeometry(240, 180)
    report = validate_stream(stream_of((239, 179, 0, 1), (240, 0, 1, 1), (0, 180, 2, 0), geometry=g))
    assert report.indices == [1, 2]


def test_every_violation_listed():
    report = validate_stream(stream_of((0, 0, 5, 1), (300, 0, 4, 1), (0, 0, 3, 0), (1, 1, 6, 1)))
    assert report.indices == [1, 2]
    assert (1, "x out of range") in report.violations
    assert (1, "time decreases") in report.violations


def test_stream_is_immutable():
    s = stream_of((1, 2, 3, 1))
    with pytest.raises(ValueError):
        s.x[0] = 5


def test_indexing_and_iteration_roundtrip():
    events = [Event(1, 2, 3, Polarity.POSITIVE), Event(4, 5, 6, Polarity.NEGATIVE)]
    s = EventStream.from_events(events)
    assert list(s) == events
    assert s[1] == events[1]
    assert len(s[1:]) == 1


def test_full_u64_timestamp_kept():
    s = stream_of((0, 0, 2**64 - 1, 1))
    assert s[0].t == 2**64 - 1


@given(st.lists(st.integers(0, 1000), max_size=50))
def test_accepted_stream_is_sorted(ts):
    s = EventStream(SensorGeometry(), np.zeros(len(ts)), np.zeros(len(ts)), ts, np.ones(len(ts)))
    if validate_stream(s).ok:
        assert np.array_equal(np.sort(s.t, kind="stable"), s.t)
    else:
        assert sorted(ts) != ts
