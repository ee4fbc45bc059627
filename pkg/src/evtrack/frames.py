"""Integration of event streams into intensity images (event frames).

Two policies are provided: a constant number of events per frame and a
constant time window per frame. Both polarities add +1 to the pixel count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Union

import numpy as np

from .events import EventStream, SensorGeometry

DEFAULT_EVENTS_PER_FRAME = 3000

# upper bound on scratch memory per accumulation batch (cells, int64)
_BATCH_CELLS = 1 << 21


class InvalidPolicy(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class IntensityImage:
    """Per-pixel event counts of one frame, indexed ``counts[y, x]``."""

    geometry: SensorGeometry
    counts: np.ndarray
    first_t: int
    last_t: int
    n_events: int

    def __post_init__(self):
        g = self.geometry
        if self.counts.shape != (g.height, g.width):
            raise ValueError(f"counts shape {self.counts.shape} does not match {g.height}x{g.width}")
        if self.first_t > self.last_t:
            raise ValueError("first_t must not exceed last_t")

    @classmethod
    def from_counts(cls, counts, first_t: int = 0, last_t: int = 0) -> "IntensityImage":
        """Wrap a bare ``(height, width)`` count array, e.g. for tests."""
        counts = np.asarray(counts, dtype=np.int64)
        h, w = counts.shape
        return cls(SensorGeometry(w, h), counts, first_t, last_t, int(counts.sum()))

    def __eq__(self, other):
        if not isinstance(other, IntensityImage):
            return NotImplemented
        return (
            self.geometry == other.geometry
            and self.first_t == other.first_t
            and self.last_t == other.last_t
            and self.n_events == other.n_events
            and np.array_equal(self.counts, other.counts)
        )

    __hash__ = None


@dataclass(frozen=True)
class CountBased:
    n: int = DEFAULT_EVENTS_PER_FRAME

    def __post_init__(self):
        if self.n < 1:
            raise InvalidPolicy(f"events per frame must be >= 1, got {self.n}")


@dataclass(frozen=True)
class TimeBased:
    dt: int

    def __post_init__(self):
        if self.dt < 1:
            raise InvalidPolicy(f"frame interval must be >= 1 us, got {self.dt}")


FramingPolicy = Union[CountBased, TimeBased]


def _accumulate(stream: EventStream, lo: int, hi: int, frame_of_event: np.ndarray, n_frames: int) -> np.ndarray:
    """Count events[lo:hi] into ``n_frames`` stacked images via one bincount."""
    g = stream.geometry
    cells = g.n_pixels
    flat = stream.y[lo:hi].astype(np.int64) * g.width + stream.x[lo:hi]
    flat += frame_of_event * cells
    out = np.bincount(flat, minlength=n_frames * cells)
    out.flags.writeable = False
    return out.reshape(n_frames, g.height, g.width)


def iter_count_frames(stream: EventStream, n: int = DEFAULT_EVENTS_PER_FRAME) -> Iterator[IntensityImage]:
    """Yield one image per ``n`` consecutive events; a trailing partial group is dropped."""
    if n < 1:
        raise InvalidPolicy(f"events per frame must be >= 1, got {n}")
    g = stream.geometry
    n_frames = len(stream) // n
    batch = max(1, _BATCH_CELLS // g.n_pixels)
    t = stream.t
    for f0 in range(0, n_frames, batch):
        f1 = min(n_frames, f0 + batch)
        lo, hi = f0 * n, f1 * n
        local = np.arange(hi - lo, dtype=np.int64) // n
        stack = _accumulate(stream, lo, hi, local, f1 - f0)
        for k in range(f1 - f0):
            s = lo + k * n
            yield IntensityImage(g, stack[k], int(t[s]), int(t[s + n - 1]), n)


def integrate_count(stream: EventStream, n: int = DEFAULT_EVENTS_PER_FRAME) -> List[IntensityImage]:
    return list(iter_count_frames(stream, n))


def iter_time_frames(stream: EventStream, dt: int) -> Iterator[IntensityImage]:
    """Yield one image per half-open window ``[t0 + k*dt, t0 + (k+1)*dt)``.

    ``t0`` is the first event's timestamp. Windows without events yield an
    all-zero image whose ``first_t``/``last_t`` are both the window start.
    """
    if dt < 1:
        raise InvalidPolicy(f"frame interval must be >= 1 us, got {dt}")
    if not len(stream):
        return
    g = stream.geometry
    t = stream.t
    t0 = int(t[0])
    window = (t - np.uint64(t0)) // np.uint64(dt)
    n_frames = int(window[-1]) + 1
    batch = max(1, _BATCH_CELLS // g.n_pixels)
    for f0 in range(0, n_frames, batch):
        f1 = min(n_frames, f0 + batch)
        # event index range of every window in this batch
        edges = np.searchsorted(window, np.arange(f0, f1 + 1, dtype=np.uint64), side="left").tolist()
        lo, hi = edges[0], edges[-1]
        local = window[lo:hi].astype(np.int64) - f0
        stack = _accumulate(stream, lo, hi, local, f1 - f0)
        for k in range(f1 - f0):
            a, b = edges[k], edges[k + 1]
            if b > a:
                first, last = int(t[a]), int(t[b - 1])
            else:
                first = last = t0 + (f0 + k) * dt
            yield IntensityImage(g, stack[k], first, last, b - a)


def integrate_time(stream: EventStream, dt: int) -> List[IntensityImage]:
    return list(iter_time_frames(stream, dt))


def iter_frames(stream: EventStream, policy: FramingPolicy) -> Iterator[IntensityImage]:
    if isinstance(policy, CountBased):
        return iter_count_frames(stream, policy.n)
    if isinstance(policy, TimeBased):
        return iter_time_frames(stream, policy.dt)
    raise InvalidPolicy(f"unknown framing policy {policy!r}")
