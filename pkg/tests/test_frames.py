from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_stream
from evtrack.events import Event, EventStream, SensorGeometry
from evtrack.frames import (CountBased, InvalidPolicy, TimeBased, integrate_count, integrate_time,
                            iter_frames)


def at(*ts, x=1, y=1):
    return EventStream.from_events([Event(x, y, t, 1) for t in ts])


def test_three_events_one_pixel():
    s = EventStream.from_events([Event(5, 7, t, t % 2) for t in range(3)])
    [img] = integrate_count(s, 3)
    assert img.counts[7, 5] == 3
    assert img.counts.sum() == 3
    assert (img.first_t, img.last_t, img.n_events) == (0, 2, 3)


def test_trailing_partial_frame_dropped():
    s = at(*range(7))
    frames = integrate_count(s, 3)
    assert len(frames) == 2
    assert [f.first_t for f in frames] == [0, 3]


def test_count_frames_match_direct_partition(rng):
    s = random_stream(rng, 10_000)
    frames = integrate_count(s, 3000)
    assert len(frames) == 3
    events = list(zip(s.x.tolist(), s.y.tolist()))
    for k, img in enumerate(frames):
        expected = Counter(events[k * 3000:(k + 1) * 3000])
        got = Counter({(x, y): int(img.counts[y, x]) for y, x in zip(*np.nonzero(img.counts))})
        assert got == expected
        assert img.n_events == 3000 == img.counts.sum()


def test_count_frames_span_batches(rng):
    # more frames than one accumulation batch holds
    g = SensorGeometry(240, 180)
    s = random_stream(rng, 200 * 7, g)
    frames = integrate_count(s, 7)
    assert len(frames) == 200
    for k in (0, 47, 48, 49, 199):
        sub = s[k * 7:(k + 1) * 7]
        ref = np.zeros((180, 240), dtype=np.int64)
        np.add.at(ref, (sub.y.astype(int), sub.x.astype(int)), 1)
        assert np.array_equal(frames[k].counts, ref)


@pytest.mark.parametrize("ts,totals", [
    ((0, 999), [2]),
    ((0, 1000), [1, 1]),
    ((0, 2500), [1, 0, 1]),
])
def test_time_windows(ts, totals):
    frames = integrate_time(at(*ts), 1000)
    assert [f.n_events for f in frames] == totals
    assert [int(f.counts.sum()) for f in frames] == totals


def test_time_windows_start_at_first_event():
    frames = integrate_time(at(500, 1499, 1500), 1000)
    assert [f.n_events for f in frames] == [2, 1]
    assert (frames[1].first_t, frames[1].last_t) == (1500, 1500)


def test_empty_time_window_metadata():
    frames = integrate_time(at(0, 2500), 1000)
    assert (frames[1].first_t, frames[1].last_t) == (1000, 1000)
    assert not frames[1].counts.any()


def test_time_windows_oracle(rng):
    s = random_stream(rng, 2000, t_max=50_000)
    dt = 777
    frames = integrate_time(s, dt)
    t0 = int(s.t[0])
    windows = [(int(t) - t0) // dt for t in s.t]
    assert len(frames) == windows[-1] + 1
    for k, f in enumerate(frames):
        assert f.n_events == windows.count(k)


def test_empty_stream_no_frames():
    assert integrate_count(EventStream.empty(), 3) == []
    assert integrate_time(EventStream.empty(), 10) == []


@pytest.mark.parametrize("fn", [integrate_count, integrate_time])
def test_zero_policy_rejected(fn):
    with pytest.raises(InvalidPolicy):
        fn(at(1, 2), 0)
    with pytest.raises(InvalidPolicy):
        CountBased(0)
    with pytest.raises(InvalidPolicy):
        TimeBased(0)


def test_dispatch(rng):
    s = random_stream(rng, 100, t_max=10_000)
    assert list(iter_frames(s, CountBased(10))) == integrate_count(s, 10)
    assert list(iter_frames(s, TimeBased(500))) == integrate_time(s, 500)


def test_images_are_read_only(rng):
    img = integrate_count(random_stream(rng, 10), 5)[0]
    with pytest.raises(ValueError):
        img.counts[0, 0] = 1


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), size=st.integers(0, 3000), n=st.integers(1, 700))
def test_conservation_and_polarity_invariance(seed, size, n):
    rng = np.random.default_rng(seed)
    s = random_stream(rng, size, SensorGeometry(32, 24), t_max=2_000_000)
    frames = integrate_count(s, n)
    assert sum(f.n_events for f in frames) == n * (size // n)
    assert sum(int(f.counts.sum()) for f in frames) == n * (size // n)
    assert integrate_count(s.with_flipped_polarity(), n) == frames
    assert integrate_count(s, n) == frames
    tf = integrate_time(s, 1 + n * 1000)
    assert sum(f.n_events for f in tf) == size
    assert integrate_time(s.with_flipped_polarity(), 1 + n * 1000) == tf
