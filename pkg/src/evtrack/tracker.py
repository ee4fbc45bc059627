"""From per-frame ROIs to a smoothed metric trajectory.

Depth follows the pinhole relation ``side_px = focal_px * object_size_cm / z``;
the lateral coordinates back-project the ROI centre through the same model.
Coordinates are smoothed with a trailing moving average over the previous
``l`` valid frames (the current frame is not part of its own average).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .events import EventStream, SensorGeometry
from .frames import CountBased, FramingPolicy, iter_frames
from .roi import DEFAULT_RUN_LENGTH, RoiFeatures, area_reduction, extract_roi, roi_features
from .trajectory import Trajectory

DEFAULT_SMOOTHING_LENGTH = 20
DEFAULT_MIN_ACTIVE_FRACTION = 0.20


class CalibrationError(ValueError):
    pass


class TooFewRecords(CalibrationError):
    pass


class NonPositiveInput(CalibrationError):
    pass


class DegenerateRoi(ValueError):
    pass


@dataclass(frozen=True)
class CalibrationModel:
    focal_px: float
    object_size_cm: float
    principal_point: Tuple[float, float] = (120.0, 90.0)

    def __post_init__(self):
        if not self.focal_px > 0:
            raise CalibrationError(f"focal length must be positive, got {self.focal_px}")
        if not self.object_size_cm > 0:
            raise CalibrationError(f"object size must be positive, got {self.object_size_cm}")

    @classmethod
    def centered(cls, focal_px: float, object_size_cm: float,
                 geometry: SensorGeometry | None = None) -> "CalibrationModel":
        g = geometry or SensorGeometry()
        return cls(focal_px, object_size_cm, (g.width / 2, g.height / 2))

    def check_geometry(self, geometry: SensorGeometry) -> None:
        cx, cy = self.principal_point
        if not (0 <= cx <= geometry.width and 0 <= cy <= geometry.height):
            raise CalibrationError(f"principal point {self.principal_point} outside sensor")

    def side_at(self, z_cm):
        """Projected object side in pixels at depth ``z_cm``."""
        return self.focal_px * self.object_size_cm / np.asarray(z_cm, dtype=float)


@dataclass(frozen=True)
class TrackerConfig:
    smoothing_length: int = DEFAULT_SMOOTHING_LENGTH
    min_active_fraction: float = DEFAULT_MIN_ACTIVE_FRACTION

    def __post_init__(self):
        if self.smoothing_length < 1:
            raise ValueError("smoothing length must be >= 1")
        if not 0.0 <= self.min_active_fraction <= 1.0:
            raise ValueError("min_active_fraction must lie in [0, 1]")


def fit_calibration(records: Iterable[Tuple[float, float]], object_size_cm: float,
                    geometry: SensorGeometry | None = None) -> CalibrationModel:
    """Least-squares focal length from ``(distance_cm, measured_side_px)`` pairs.

    Minimises ``sum((side_i - f * S / d_i) ** 2)`` which has the closed form
    ``f = sum(side_i * S / d_i) / sum((S / d_i) ** 2)``.
    """
    recs = [(float(d), float(s)) for d, s in records]
    if len(recs) < 2:
        raise TooFewRecords(f"need at least 2 calibration records, got {len(recs)}")
    if not object_size_cm > 0:
        raise NonPositiveInput(f"object size must be positive, got {object_size_cm}")
    d = np.array([r[0] for r in recs])
    side = np.array([r[1] for r in recs])
    if np.any(d <= 0) or np.any(side <= 0):
        raise NonPositiveInput("distances and sides must be positive")
    a = object_size_cm / d
    f = float(np.dot(side, a) / np.dot(a, a))
    return CalibrationModel.centered(f, object_size_cm, geometry)


def pixel_to_world(features: RoiFeatures, calib: CalibrationModel) -> Tuple[float, float, float]:
    if not features.side > 0:
        raise DegenerateRoi("ROI side must be positive")
    z = calib.focal_px * calib.object_size_cm / features.side
    cx, cy = calib.principal_point
    x = (features.center_x - cx) * z / calib.focal_px
    y = (features.center_y - cy) * z / calib.focal_px
    return x, y, z


def is_valid_frame(features: RoiFeatures, config: TrackerConfig = TrackerConfig()) -> bool:
    return features.active_fraction >= config.min_active_fraction


def moving_average(values, l: int) -> np.ndarray:
    """Trailing mean of the ``l`` preceding samples along axis 0.

    ``out[i] = mean(values[max(0, i-l):i])`` for ``i >= 1``; ``out[0]``
    passes through. Works on 1-D sequences and on N x k arrays.
    """
    if l < 1:
        raise ValueError(f"window length must be >= 1, got {l}")
    v = np.asarray(values, dtype=np.float64)
    out = v.copy()
    n = len(v)
    if n < 2:
        return out
    warm = min(l, n - 1)
    for i in range(1, warm + 1):
        out[i] = v[:i].sum(axis=0) / i
    if n - 1 > l:
        win = np.lib.stride_tricks.sliding_window_view(v[:-1], l, axis=0)
        # windows ending at i-1 for i = l+1 .. n-1; skip the one already done in warm-up
        out[l + 1:] = win[1:].sum(axis=-1) / l
    return out


def smooth(raw: Trajectory, l: int = DEFAULT_SMOOTHING_LENGTH) -> Trajectory:
    return raw.with_xyz(moving_average(raw.xyz, l))


@dataclass
class TrackStats:
    frames: int = 0
    skipped: int = 0
    reductions: List[float] = field(default_factory=list)

    @property
    def mean_reduction(self) -> float:
        return float(np.mean(self.reductions)) if self.reductions else 0.0


def track_with_stats(stream: EventStream, framing: FramingPolicy = CountBased(),
                     c: int = DEFAULT_RUN_LENGTH, calib: Optional[CalibrationModel] = None,
                     config: TrackerConfig = TrackerConfig()) -> Tuple[Trajectory, TrackStats]:
    """Run the full frame -> ROI -> world -> smoothing pipeline.

    Frames without a ROI or below the active-pixel threshold are skipped
    (no interpolation). ``reductions`` collects the crop fraction of every
    frame where a ROI was found.
    """
    g = stream.geometry
    if calib is None:
        raise CalibrationError("a calibration model is required")
    calib.check_geometry(g)
    stats = TrackStats()
    idx: List[int] = []
    ts: List[int] = []
    pts: List[Tuple[float, float, float]] = []
    for k, image in enumerate(iter_frames(stream, framing)):
        stats.frames += 1
        roi = extract_roi(image, c)
        if roi is None:
            stats.skipped += 1
            continue
        stats.reductions.append(area_reduction(roi, g.width, g.height))
        feats = roi_features(image, roi)
        if not is_valid_frame(feats, config):
            stats.skipped += 1
            continue
        idx.append(k)
        ts.append(image.last_t)
        pts.append(pixel_to_world(feats, calib))
    raw = Trajectory(idx, ts, np.array(pts, dtype=np.float64).reshape(-1, 3))
    return smooth(raw, config.smoothing_length), stats


def track(stream: EventStream, framing: FramingPolicy = CountBased(), c: int = DEFAULT_RUN_LENGTH,
          calib: Optional[CalibrationModel] = None, config: TrackerConfig = TrackerConfig()) -> Trajectory:
    return track_with_stats(stream, framing, c, calib, config)[0]


# ---------------------------------------------------------------- files

def read_calibration(data: bytes, geometry: SensorGeometry | None = None) -> CalibrationModel:
    """Parse a calibration file.

    The first non-comment line must be ``object_size_cm <S>``. The rest is
    either a fitted model (``focal_px <f>`` and optionally
    ``principal_point <cx> <cy>``) or measurement records
    ``<distance_cm> <side_px>``, which are fitted on load.
    """
    size = None
    focal = None
    principal = None
    records: List[Tuple[float, float]] = []
    for lineno, raw in enumerate(data.decode("utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        try:
            if size is None:
                if len(fields) != 2 or fields[0] != "object_size_cm":
                    raise CalibrationError(f"line {lineno}: expected header 'object_size_cm <S>'")
                size = float(fields[1])
            elif fields[0] == "focal_px" and len(fields) == 2:
                focal = float(fields[1])
            elif fields[0] == "principal_point" and len(fields) == 3:
                principal = (float(fields[1]), float(fields[2]))
            elif len(fields) == 2:
                records.append((float(fields[0]), float(fields[1])))
            else:
                raise CalibrationError(f"line {lineno}: unrecognised line {line!r}")
        except ValueError as exc:
            if isinstance(exc, CalibrationError):
                raise
            raise CalibrationError(f"line {lineno}: bad number in {line!r}") from None
    if size is None:
        raise CalibrationError("missing 'object_size_cm' header")
    if focal is not None:
        if records:
            raise CalibrationError("file mixes a fitted model with raw records")
        if principal is None:
            return CalibrationModel.centered(focal, size, geometry)
        return CalibrationModel(focal, size, principal)
    model = fit_calibration(records, size, geometry)
    if principal is not None:
        model = CalibrationModel(model.focal_px, size, principal)
    return model


def write_calibration(model: CalibrationModel) -> bytes:
    cx, cy = model.principal_point
    return (f"object_size_cm {model.object_size_cm!r}\n"
            f"focal_px {model.focal_px!r}\n"
            f"principal_point {cx!r} {cy!r}\n").encode("utf-8")


def write_records(records: Sequence[Tuple[float, float]], object_size_cm: float) -> bytes:
    lines = [f"object_size_cm {object_size_cm!r}\n"]
    lines += [f"{d!r} {s!r}\n" for d, s in records]
    return "".join(lines).encode("utf-8")
