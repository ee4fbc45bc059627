"""Event-camera hand/object tracking: frames, ROIs, depth and trajectory error."""

from .events import Event, EventStream, Polarity, SensorGeometry, ValidationReport, validate_stream
from .evaluation import DtwResult, Plane, dtw, report
from .frames import CountBased, IntensityImage, TimeBased, integrate_count, integrate_time
from .roi import Axis, Roi, RoiFeatures, axis_sums, bounds_consecutive, bounds_simple, extract_roi, roi_features, squarify
from .synth import SceneSpec, generate
from .tracker import (CalibrationModel, TrackerConfig, fit_calibration, is_valid_frame, pixel_to_world,
                      smooth, track)
from .trajectory import TrackedPoint, Trajectory

__version__ = "0.1.0"
