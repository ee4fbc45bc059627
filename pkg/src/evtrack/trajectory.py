"""Metric 3D trajectories and their text file format.

One point per line: ``<frame_index> <t_us> <x_cm> <y_cm> <z_cm>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np


@dataclass(frozen=True)
class TrackedPoint:
    frame_index: int
    t: int
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not self.z > 0:
            raise ValueError(f"depth must be positive, got {self.z}")


def _readonly(a, dtype, ndim):
    a = np.array(a, dtype=dtype)
    if ndim == 2:
        a = a.reshape(-1, 3)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time-ordered points; columns ``frame_index``, ``t`` and ``xyz`` (N x 3, cm)."""

    frame_index: np.ndarray
    t: np.ndarray
    xyz: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "frame_index", _readonly(self.frame_index, np.int64, 1))
        object.__setattr__(self, "t", _readonly(self.t, np.uint64, 1))
        object.__setattr__(self, "xyz", _readonly(self.xyz, np.float64, 2))
        n = len(self.frame_index)
        if len(self.t) != n or len(self.xyz) != n:
            raise ValueError("trajectory columns must have equal length")
        if np.any(np.diff(self.frame_index) <= 0):
            raise ValueError("frame_index must be strictly increasing")
        if np.any(self.t[1:] < self.t[:-1]):
            raise ValueError("timestamps must be non-decreasing")
        if n and not np.all(self.xyz[:, 2] > 0):
            raise ValueError("depth must be positive")

    @classmethod
    def empty(cls) -> "Trajectory":
        return cls(np.zeros(0), np.zeros(0), np.zeros((0, 3)))

    @classmethod
    def from_points(cls, points: Iterable[TrackedPoint]) -> "Trajectory":
        pts = list(points)
        return cls(
            [p.frame_index for p in pts],
            [p.t for p in pts],
            np.array([(p.x, p.y, p.z) for p in pts], dtype=np.float64).reshape(-1, 3),
        )

    def __len__(self) -> int:
        return len(self.frame_index)

    def __getitem__(self, i: int) -> TrackedPoint:
        x, y, z = self.xyz[i].tolist()
        return TrackedPoint(int(self.frame_index[i]), int(self.t[i]), x, y, z)

    def __iter__(self) -> Iterator[TrackedPoint]:
        for i in range(len(self)):
            yield self[i]

    def __eq__(self, other):
        if not isinstance(other, Trajectory):
            return NotImplemented
        return (np.array_equal(self.frame_index, other.frame_index)
                and np.array_equal(self.t, other.t)
                and np.array_equal(self.xyz, other.xyz))

    __hash__ = None

    def with_xyz(self, xyz) -> "Trajectory":
        return Trajectory(self.frame_index, self.t, xyz)


class TrajectoryFormatError(ValueError):
    pass


def write_trajectory(traj: Trajectory) -> bytes:
    lines = [
        f"{f} {t} {x!r} {y!r} {z!r}\n"
        for f, t, (x, y, z) in zip(traj.frame_index.tolist(), traj.t.tolist(), traj.xyz.tolist())
    ]
    return "".join(lines).encode("utf-8")


def read_trajectory(data: bytes) -> Trajectory:
    frames, ts, xyz = [], [], []
    for lineno, raw in enumerate(data.decode("utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 5:
            raise TrajectoryFormatError(f"line {lineno}: expected 5 fields, got {len(fields)}")
        try:
            frames.append(int(fields[0]))
            ts.append(int(fields[1]))
            xyz.append(tuple(float(v) for v in fields[2:]))
        except ValueError:
            raise TrajectoryFormatError(f"line {lineno}: bad number in {line!r}") from None
    try:
        return Trajectory(frames, ts, np.array(xyz, dtype=np.float64).reshape(-1, 3))
    except (ValueError, OverflowError) as exc:
        raise TrajectoryFormatError(str(exc)) from None
