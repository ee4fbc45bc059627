"""Region-of-interest extraction from column/row intensity sums.

A column (row) belongs to the ROI span when its sum is strictly above the
mean of all column (row) sums. Boundaries are only accepted where ``c``
consecutive sums clear the mean, which rejects isolated noise spikes, and
the resulting rectangle is cut down to a square along its longer axis.

Run semantics: a run of length ``c`` *includes* the boundary index itself,
so ``c = 1`` is the plain first/last-above-mean rule. The right/bottom
boundary mirrors the left/top one (a run of ``c`` ending at the boundary).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .frames import IntensityImage

DEFAULT_RUN_LENGTH = 3


class Axis(enum.Enum):
    COLUMNS = "columns"
    ROWS = "rows"


@dataclass(frozen=True)
class Roi:
    """Axis-aligned rectangle with inclusive pixel bounds."""

    x_min: int
    x_max: int
    y_min: int
    y_max: int

    def __post_init__(self):
        if not (0 <= self.x_min <= self.x_max and 0 <= self.y_min <= self.y_max):
            raise ValueError(f"invalid ROI bounds {self}")

    @property
    def width(self) -> int:
        return self.x_max - self.x_min + 1

    @property
    def height(self) -> int:
        return self.y_max - self.y_min + 1

    @property
    def area(self) -> int:
        return self.width * self.height

    @property
    def is_square(self) -> bool:
        return self.width == self.height

    def fits(self, width: int, height: int) -> bool:
        return self.x_max < width and self.y_max < height

    def contains(self, other: "Roi") -> bool:
        return (self.x_min <= other.x_min and other.x_max <= self.x_max
                and self.y_min <= other.y_min and other.y_max <= self.y_max)


@dataclass(frozen=True)
class RoiFeatures:
    center_x: float
    center_y: float
    side: float
    active_fraction: float


def axis_sums(image: IntensityImage, axis: Axis) -> np.ndarray:
    """Column sums (length width) or row sums (length height) of the counts."""
    if axis is Axis.COLUMNS:
        return image.counts.sum(axis=0)
    if axis is Axis.ROWS:
        return image.counts.sum(axis=1)
    raise ValueError(f"unknown axis {axis!r}")


def _above_mean(sums: np.ndarray) -> np.ndarray:
    # s > sum/n  <=>  s*n > sum, kept in exact integer arithmetic when possible
    sums = np.asarray(sums)
    if sums.size == 0:
        raise ValueError("sums must be non-empty")
    if np.issubdtype(sums.dtype, np.integer):
        s = sums.astype(np.int64)
        return s * s.size > int(s.sum())
    return sums > sums.mean()


def bounds_simple(sums) -> Optional[Tuple[int, int]]:
    """First and last index whose sum is strictly above the mean."""
    idx = np.flatnonzero(_above_mean(sums))
    if idx.size == 0:
        return None
    return int(idx[0]), int(idx[-1])


def bounds_consecutive(sums, c: int = DEFAULT_RUN_LENGTH) -> Optional[Tuple[int, int]]:
    """Boundaries backed by ``c`` consecutive above-mean sums.

    The lower bound is the start of the first such run and the upper bound
    the end of the last one; ``None`` when no run of length ``c`` exists.
    """
    if c < 1:
        raise ValueError(f"run length must be >= 1, got {c}")
    above = _above_mean(sums)
    if c > above.size:
        return None
    run = np.concatenate(([0], np.cumsum(above, dtype=np.int64)))
    starts = np.flatnonzero(run[c:] - run[:-c] == c)
    if starts.size == 0:
        return None
    return int(starts[0]), int(starts[-1]) + c - 1


def _best_window(sums: np.ndarray, lo: int, hi: int, side: int) -> int:
    """Start of the length-``side`` window in ``sums[lo:hi+1]`` with the largest total."""
    seg = np.concatenate(([0], np.cumsum(sums[lo:hi + 1], dtype=np.int64)))
    totals = seg[side:] - seg[:-side]
    return lo + int(np.argmax(totals))  # argmax picks the first maximum


def _squarify(col_sums: np.ndarray, row_sums: np.ndarray, roi: Roi) -> Roi:
    w, h = roi.width, roi.height
    if w > h:
        x0 = _best_window(col_sums, roi.x_min, roi.x_max, h)
        return Roi(x0, x0 + h - 1, roi.y_min, roi.y_max)
    if h > w:
        y0 = _best_window(row_sums, roi.y_min, roi.y_max, w)
        return Roi(roi.x_min, roi.x_max, y0, y0 + w - 1)
    return roi


def squarify(image: IntensityImage, roi: Roi) -> Roi:
    """Shrink the longer side of ``roi`` to the shorter one.

    The kept window along the longer axis is the one carrying the most
    intensity (full-image column or row sums); ties go to the lowest start.
    """
    if not roi.fits(image.geometry.width, image.geometry.height):
        raise ValueError(f"{roi} outside image bounds")
    return _squarify(axis_sums(image, Axis.COLUMNS), axis_sums(image, Axis.ROWS), roi)


def extract_roi(image: IntensityImage, c: int = DEFAULT_RUN_LENGTH) -> Optional[Roi]:
    """Square ROI of the frame, or ``None`` when either axis has no qualifying run."""
    cols = axis_sums(image, Axis.COLUMNS)
    xb = bounds_consecutive(cols, c)
    if xb is None:
        return None
    rows = axis_sums(image, Axis.ROWS)
    yb = bounds_consecutive(rows, c)
    if yb is None:
        return None
    return _squarify(cols, rows, Roi(xb[0], xb[1], yb[0], yb[1]))


def roi_features(image: IntensityImage, roi: Roi) -> RoiFeatures:
    """Centre, side and active-pixel fraction of ``roi`` within ``image``.

    ``side`` is the inclusive edge length; for a non-square rectangle it
    is ``sqrt(width * height)`` so the fraction is always active / area.
    """
    if not roi.fits(image.geometry.width, image.geometry.height):
        raise ValueError(f"{roi} outside image bounds")
    patch = image.counts[roi.y_min:roi.y_max + 1, roi.x_min:roi.x_max + 1]
    active = int(np.count_nonzero(patch))
    side = roi.width if roi.is_square else math.sqrt(roi.area)
    return RoiFeatures(
        center_x=(roi.x_min + roi.x_max) / 2,
        center_y=(roi.y_min + roi.y_max) / 2,
        side=float(side),
        active_fraction=active / roi.area,
    )


def area_reduction(roi: Optional[Roi], width: int, height: int) -> float:
    """Fraction of the frame discarded by cropping to ``roi`` (0 when absent)."""
    if roi is None:
        return 0.0
    return 1.0 - roi.area / (width * height)
