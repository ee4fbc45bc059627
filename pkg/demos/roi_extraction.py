"""ROI search on a hand-made count image: simple vs run-length bounds."""

import numpy as np

from evtrack import IntensityImage, axis_sums, bounds_consecutive, bounds_simple, extract_roi, roi_features
from evtrack.roi import Axis, area_reduction

rng = np.random.default_rng(0)
counts = rng.poisson(0.05, size=(180, 240))
counts[60:90, 100:125] += rng.poisson(4, size=(30, 25))
counts[10, 5:8] += 60   # a short bright streak

img = IntensityImage.from_counts(counts)
cols = axis_sums(img, Axis.COLUMNS)
rows = axis_sums(img, Axis.ROWS)
print("simple bounds      x", bounds_simple(cols), " y", bounds_simple(rows))
for c in (1, 3, 5):
    print(f"run length c={c}     x", bounds_consecutive(cols, c), " y", bounds_consecutive(rows, c))

roi = extract_roi(img, 3)
print("square ROI:", roi)
print("features:", roi_features(img, roi))
print(f"area reduction: {area_reduction(roi, 240, 180):.3f}")
