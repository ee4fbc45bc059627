"""Core event types: sensor geometry, single events and ordered event streams.

Streams are stored column-wise in read-only numpy arrays so that every stage
can work vectorised on millions of events. Individual :class:`Event` values
are materialised only on indexing/iteration.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, Tuple

import numpy as np

U64_MAX = 2**64 - 1
COORD_MAX = 2**16 - 1


class Polarity(enum.IntEnum):
    NEGATIVE = 0
    POSITIVE = 1


@dataclass(frozen=True)
class SensorGeometry:
    """Pixel dimensions of the sensor; defaults to a 240x180 DAVIS array."""

    width: int = 240
    height: int = 180

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"sensor geometry must be at least 1x1, got {self.width}x{self.height}")
        if self.width > COORD_MAX or self.height > COORD_MAX:
            raise ValueError("sensor geometry exceeds 16-bit pixel addressing")

    @property
    def n_pixels(self) -> int:
        return self.width * self.height

    def contains(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height


@dataclass(frozen=True)
class Event:
    x: int
    y: int
    t: int
    polarity: Polarity

    def __post_init__(self):
        if not (0 <= self.x <= COORD_MAX and 0 <= self.y <= COORD_MAX):
            raise ValueError(f"pixel coordinates out of 16-bit range: ({self.x}, {self.y})")
        if not 0 <= self.t <= U64_MAX:
            raise ValueError(f"timestamp {self.t} outside unsigned 64-bit range")
        object.__setattr__(self, "polarity", Polarity(self.polarity))


def _frozen(a: np.ndarray, dtype) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=dtype)
    if a.ndim != 1:
        raise ValueError("event columns must be one-dimensional")
    # read-only view; never flips the caller's own array flags
    a = a.view()
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class EventStream:
    """Time-ordered events observed by a sensor of the given geometry.

    Columns: ``x``/``y`` (uint16 pixel indices), ``t`` (uint64 microseconds)
    and ``p`` (uint8, 0 = negative, 1 = positive). Construction does not
    enforce the ordering/bounds invariants; use :func:`validate_stream`.
    """

    geometry: SensorGeometry
    x: np.ndarray
    y: np.ndarray
    t: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _frozen(self.x, np.uint16))
        object.__setattr__(self, "y", _frozen(self.y, np.uint16))
        object.__setattr__(self, "t", _frozen(self.t, np.uint64))
        object.__setattr__(self, "p", _frozen(self.p, np.uint8))
        n = len(self.x)
        if not (len(self.y) == len(self.t) == len(self.p) == n):
            raise ValueError("event columns must have equal length")

    @classmethod
    def empty(cls, geometry: SensorGeometry | None = None) -> "EventStream":
        z = np.zeros(0)
        return cls(geometry or SensorGeometry(), z, z, z, z)

    @classmethod
    def from_events(cls, events: Iterable[Event], geometry: SensorGeometry | None = None) -> "EventStream":
        events = list(events)
        return cls(
            geometry or SensorGeometry(),
            np.array([e.x for e in events], dtype=np.uint16),
            np.array([e.y for e in events], dtype=np.uint16),
            np.array([e.t for e in events], dtype=np.uint64),
            np.array([int(e.polarity) for e in events], dtype=np.uint8),
        )

    def __len__(self) -> int:
        return len(self.t)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return EventStream(self.geometry, self.x[i], self.y[i], self.t[i], self.p[i])
        return Event(int(self.x[i]), int(self.y[i]), int(self.t[i]), Polarity(int(self.p[i])))

    def __iter__(self) -> Iterator[Event]:
        for x, y, t, p in zip(self.x.tolist(), self.y.tolist(), self.t.tolist(), self.p.tolist()):
            yield Event(x, y, t, Polarity(p))

    def __eq__(self, other):
        if not isinstance(other, EventStream):
            return NotImplemented
        return (
            self.geometry == other.geometry
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.y, other.y)
            and np.array_equal(self.t, other.t)
            and np.array_equal(self.p, other.p)
        )

    __hash__ = None

    def with_flipped_polarity(self) -> "EventStream":
        return EventStream(self.geometry, self.x, self.y, self.t, 1 - self.p)


@dataclass
class ValidationReport:
    """Outcome of :func:`validate_stream`; ``violations`` holds (index, reason)."""

    violations: List[Tuple[int, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def indices(self) -> List[int]:
        return sorted({i for i, _ in self.violations})


def validate_stream(stream: EventStream) -> ValidationReport:
    """Check geometry bounds, polarity values and non-decreasing time.

    Every violating index is reported; an event can appear more than once
    if it breaks several rules.
    """
    g = stream.geometry
    report = ValidationReport()
    bad_x = np.flatnonzero(stream.x >= g.width)
    bad_y = np.flatnonzero(stream.y >= g.height)
    bad_p = np.flatnonzero(stream.p > 1)
    back = np.flatnonzero(stream.t[1:] < stream.t[:-1]) + 1
    for idx, reason in ((bad_x, "x out of range"), (bad_y, "y out of range"),
                        (bad_p, "bad polarity"), (back, "time decreases")):
        report.violations.extend((int(i), reason) for i in idx)
    report.violations.sort()
    return report
