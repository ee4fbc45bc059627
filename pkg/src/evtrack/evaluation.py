"""Trajectory agreement via dynamic time warping.

The reported error is the mean Euclidean distance over the matched pairs of
the optimal warping path (total path cost divided by path length).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .trajectory import Trajectory


class Plane(enum.Enum):
    XY = "XY"
    XYZ = "XYZ"

    @property
    def dims(self) -> int:
        return 2 if self is Plane.XY else 3


class EmptyTrajectory(ValueError):
    pass


@dataclass(frozen=True)
class DtwResult:
    path: List[Tuple[int, int]]
    avg_distance: float
    plane: Plane
    total_cost: float


def accumulated_cost(cost: np.ndarray) -> np.ndarray:
    """DTW accumulation of a local cost matrix, one anti-diagonal at a time.

    Returns a padded (N+1) x (M+1) table with ``D[0, 0] = 0`` and infinite
    borders; ``D[i+1, j+1]`` is the cheapest cost of aligning prefixes
    ending at (i, j).
    """
    n, m = cost.shape
    D = np.full((n + 1, m + 1), np.inf)
    D[0, 0] = 0.0
    for k in range(n + m - 1):
        i = np.arange(max(0, k - m + 1), min(n - 1, k) + 1)
        j = k - i
        prev = np.minimum(D[i, j], np.minimum(D[i, j + 1], D[i + 1, j]))
        D[i + 1, j + 1] = cost[i, j] + prev
    return D


def _traceback(D: np.ndarray) -> List[Tuple[int, int]]:
    i, j = D.shape[0] - 2, D.shape[1] - 2
    path = [(i, j)]
    while i > 0 or j > 0:
        # predecessors in preference order: diagonal, then i-1, then j-1
        diag, up, left = D[i, j], D[i, j + 1], D[i + 1, j]
        if diag <= up and diag <= left:
            i, j = i - 1, j - 1
        elif up <= left:
            i -= 1
        else:
            j -= 1
        path.append((i, j))
    path.reverse()
    return path


def _points(traj, plane: Plane) -> np.ndarray:
    pts = traj.xyz if isinstance(traj, Trajectory) else np.asarray(traj, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] < plane.dims:
        raise ValueError("expected an N x 3 point array")
    return pts[:, :plane.dims]


def dtw(a, b, plane: Plane = Plane.XYZ) -> DtwResult:
    """Align two trajectories (or N x 3 arrays) and average the matched distances."""
    pa, pb = _points(a, plane), _points(b, plane)
    if len(pa) == 0 or len(pb) == 0:
        raise EmptyTrajectory("DTW needs at least one point on each side")
    cost = np.linalg.norm(pa[:, None, :] - pb[None, :, :], axis=-1)
    D = accumulated_cost(cost)
    path = _traceback(D)
    total = float(D[-1, -1])
    return DtwResult(path, total / len(path), plane, total)


def report(a, b) -> Tuple[float, float]:
    """(XY error, XYZ error) in the trajectories' unit (centimetres)."""
    return dtw(a, b, Plane.XY).avg_distance, dtw(a, b, Plane.XYZ).avg_distance


def format_report(xy_cm: float, xyz_cm: float) -> bytes:
    """Report text in millimetres, one line per plane."""
    return f"XY {xy_cm * 10.0:.6f}\nXYZ {xyz_cm * 10.0:.6f}\n".encode("utf-8")
