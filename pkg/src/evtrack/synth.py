"""Synthetic event streams of a square object moving along a 3D path.

The object is projected through the pinhole model used for depth
estimation. Edge events fall uniformly on the projected outline (a band
``edge_width_px`` pixels thick, growing inwards; with the default of 1
every event lies within one pixel of the outline). Background noise is
uniform over the sensor. Both are homogeneous Poisson processes, so the
whole generator is reproducible from ``seed``.

Scene config format (key-value lines, ``#`` comments)::

    width 240
    height 180
    focal_px 250
    object_size_cm 6
    edge_event_rate 300000      # events / s
    noise_rate 15000            # events / s
    edge_width_px 2             # optional, default 1
    seed 7
    waypoint <t_us> <x_cm> <y_cm> <z_cm>    # repeated, time-ordered
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .events import EventStream, SensorGeometry
from .trajectory import Trajectory

Waypoint = Tuple[int, float, float, float]


class InvalidPath(ValueError):
    pass


class SceneFormatError(ValueError):
    pass


@dataclass(frozen=True)
class SceneSpec:
    geometry: SensorGeometry
    focal_px: float
    object_size_cm: float
    path: Tuple[Waypoint, ...]
    edge_event_rate: float
    noise_rate: float = 0.0
    seed: int = 0
    edge_width_px: int = 1

    def __post_init__(self):
        object.__setattr__(self, "path", tuple(
            (int(t), float(x), float(y), float(z)) for t, x, y, z in self.path))
        if self.edge_event_rate < 0 or self.noise_rate < 0:
            raise ValueError("event rates must be non-negative")
        if self.focal_px <= 0 or self.object_size_cm <= 0:
            raise ValueError("focal_px and object_size_cm must be positive")
        if self.edge_width_px < 1:
            raise ValueError("edge_width_px must be >= 1")

    @property
    def principal_point(self) -> Tuple[float, float]:
        return self.geometry.width / 2, self.geometry.height / 2

    def project(self, xyz: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Pixel centre (u, v) and side length of the object at world points ``xyz``."""
        cx, cy = self.principal_point
        x, y, z = xyz[..., 0], xyz[..., 1], xyz[..., 2]
        f = self.focal_px
        return cx + f * x / z, cy + f * y / z, f * self.object_size_cm / z


def _check_path(path: Sequence[Waypoint]) -> None:
    if not path:
        raise InvalidPath("path needs at least one waypoint")
    t = np.array([p[0] for p in path], dtype=np.int64)
    if t[0] < 0:
        raise InvalidPath("waypoint times must be non-negative")
    if np.any(np.diff(t) <= 0):
        raise InvalidPath("waypoint times must be strictly increasing")
    if any(not p[3] > 0 for p in path):
        raise InvalidPath("depth must stay positive along the path")


def densify_path(path: Sequence[Waypoint], step_us: int) -> List[Waypoint]:
    """Resample a piecewise-linear path every ``step_us``, keeping every waypoint.

    The geometric path is unchanged; useful to obtain a dense ground truth.
    """
    _check_path(path)
    t = np.array([p[0] for p in path], dtype=np.int64)
    grid = np.union1d(np.arange(t[0], t[-1], step_us, dtype=np.int64), t)
    xyz = _interp(path, grid)
    return [(int(tt), *map(float, p)) for tt, p in zip(grid, xyz)]


def _interp(path: Sequence[Waypoint], times: np.ndarray) -> np.ndarray:
    wt = np.array([p[0] for p in path], dtype=np.float64)
    w = np.array([p[1:] for p in path], dtype=np.float64)
    times = np.asarray(times, dtype=np.float64)
    return np.stack([np.interp(times, wt, w[:, k]) for k in range(3)], axis=-1)


def _velocity(path: Sequence[Waypoint], times: np.ndarray) -> np.ndarray:
    """World velocity (cm/us) of the segment containing each time."""
    if len(path) < 2:
        return np.zeros((len(times), 3))
    wt = np.array([p[0] for p in path], dtype=np.float64)
    w = np.array([p[1:] for p in path], dtype=np.float64)
    seg_v = np.diff(w, axis=0) / np.diff(wt)[:, None]
    seg = np.clip(np.searchsorted(wt, times, side="right") - 1, 0, len(path) - 2)
    return seg_v[seg]


def _poisson_times(rng: np.random.Generator, rate: float, t0: int, t1: int) -> np.ndarray:
    duration = t1 - t0
    if rate <= 0 or duration <= 0:
        return np.zeros(0, dtype=np.int64)
    n = rng.poisson(rate * duration * 1e-6)
    return np.sort(t0 + rng.integers(0, duration, size=n, dtype=np.int64))


def _edge_events(spec: SceneSpec, rng: np.random.Generator, t: np.ndarray):
    n = len(t)
    xyz = _interp(spec.path, t)
    u, v, side = spec.project(xyz)
    half = np.maximum(side - 1, 0) / 2
    edge = rng.integers(0, 4, size=n)          # 0 left, 1 right, 2 top, 3 bottom
    along = rng.random(n) * 2 * half - half     # position along the edge
    inset = np.minimum(rng.integers(0, spec.edge_width_px, size=n), np.floor(half))
    across = half - inset                        # distance of the band pixel from centre
    sign = np.where((edge == 0) | (edge == 2), -1.0, 1.0)
    vertical = edge < 2
    px = u + np.where(vertical, sign * across, along)
    py = v + np.where(vertical, along, sign * across)

    # outward normal speed of each edge decides polarity: leading edge positive
    vel = _velocity(spec.path, t)
    f, S = spec.focal_px, spec.object_size_cm
    x, y, z = xyz[:, 0], xyz[:, 1], xyz[:, 2]
    du = f * (vel[:, 0] * z - x * vel[:, 2]) / z**2
    dv = f * (vel[:, 1] * z - y * vel[:, 2]) / z**2
    dhalf = -0.5 * f * S * vel[:, 2] / z**2
    centre_speed = np.where(vertical, du, dv)
    normal_speed = sign * centre_speed + dhalf
    still = np.abs(normal_speed) < 1e-12
    pol = np.where(still, np.arange(n) % 2, normal_speed > 0).astype(np.uint8)
    return np.floor(px + 0.5), np.floor(py + 0.5), pol


def generate(spec: SceneSpec) -> Tuple[EventStream, Trajectory]:
    """Event stream plus ground truth sampled at the waypoints.

    Edge events projecting outside the sensor are dropped.
    """
    _check_path(spec.path)
    g = spec.geometry
    rng = np.random.default_rng(spec.seed)
    t0, t1 = spec.path[0][0], spec.path[-1][0]

    te = _poisson_times(rng, spec.edge_event_rate, t0, t1)
    ex, ey, ep = _edge_events(spec, rng, te)
    inside = (ex >= 0) & (ex < g.width) & (ey >= 0) & (ey < g.height)
    te, ex, ey, ep = te[inside], ex[inside], ey[inside], ep[inside]

    tn = _poisson_times(rng, spec.noise_rate, t0, t1)
    nx = rng.integers(0, g.width, size=len(tn))
    ny = rng.integers(0, g.height, size=len(tn))
    npol = rng.integers(0, 2, size=len(tn))

    t = np.concatenate([te, tn])
    order = np.argsort(t, kind="stable")
    stream = EventStream(
        g,
        np.concatenate([ex, nx])[order].astype(np.uint16),
        np.concatenate([ey, ny])[order].astype(np.uint16),
        t[order].astype(np.uint64),
        np.concatenate([ep, npol])[order].astype(np.uint8),
    )
    truth = Trajectory(
        np.arange(len(spec.path)),
        [p[0] for p in spec.path],
        np.array([p[1:] for p in spec.path], dtype=np.float64),
    )
    return stream, truth


def outline_distance(spec: SceneSpec, stream: EventStream) -> np.ndarray:
    """Distance (px) of every event from the projected outline at its timestamp."""
    xyz = _interp(spec.path, stream.t.astype(np.int64))
    u, v, side = spec.project(xyz)
    half = np.maximum(side - 1, 0) / 2
    dx = np.abs(stream.x - u)
    dy = np.abs(stream.y - v)
    # Chebyshev distance to the square boundary |max(dx, dy) - half| inside, Euclidean outside
    ox, oy = np.maximum(dx - half, 0), np.maximum(dy - half, 0)
    outside = np.hypot(ox, oy)
    inside = half - np.maximum(dx, dy)
    return np.where((ox > 0) | (oy > 0), outside, inside)


# ---------------------------------------------------------------- config

_KEYS = {
    "width": int, "height": int, "focal_px": float, "object_size_cm": float,
    "edge_event_rate": float, "noise_rate": float, "seed": int, "edge_width_px": int,
}
_REQUIRED = ("focal_px", "object_size_cm", "edge_event_rate")


def read_scene(data: bytes) -> SceneSpec:
    values = {}
    path: List[Waypoint] = []
    for lineno, raw in enumerate(data.decode("utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *rest = line.split()
        try:
            if key == "waypoint":
                if len(rest) != 4:
                    raise SceneFormatError(f"line {lineno}: waypoint needs <t_us> <x> <y> <z>")
                path.append((int(rest[0]), float(rest[1]), float(rest[2]), float(rest[3])))
            elif key in _KEYS:
                if len(rest) != 1:
                    raise SceneFormatError(f"line {lineno}: '{key}' takes one value")
                values[key] = _KEYS[key](rest[0])
            else:
                raise SceneFormatError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, SceneFormatError):
                raise
            raise SceneFormatError(f"line {lineno}: bad value in {line!r}") from None
    missing = [k for k in _REQUIRED if k not in values]
    if missing:
        raise SceneFormatError(f"missing keys: {', '.join(missing)}")
    try:
        _check_path(path)
        geometry = SensorGeometry(values.pop("width", 240), values.pop("height", 180))
        return SceneSpec(geometry=geometry, path=tuple(path), **values)
    except ValueError as exc:
        raise SceneFormatError(str(exc)) from None


def write_scene(spec: SceneSpec) -> bytes:
    g = spec.geometry
    lines = [
        f"width {g.width}", f"height {g.height}",
        f"focal_px {spec.focal_px!r}", f"object_size_cm {spec.object_size_cm!r}",
        f"edge_event_rate {spec.edge_event_rate!r}", f"noise_rate {spec.noise_rate!r}",
        f"edge_width_px {spec.edge_width_px}", f"seed {spec.seed}",
    ]
    lines += [f"waypoint {t} {x!r} {y!r} {z!r}" for t, x, y, z in spec.path]
    return ("\n".join(lines) + "\n").encode("utf-8")
