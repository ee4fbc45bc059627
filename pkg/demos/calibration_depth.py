"""Fit the focal length from (distance, side) records and map pixels to cm."""

from evtrack import CalibrationModel, fit_calibration, pixel_to_world
from evtrack.roi import RoiFeatures

S = 6.0
records = [(40.0, 37.4), (50.0, 30.1), (60.0, 24.9), (70.0, 21.5), (80.0, 18.8)]
model = fit_calibration(records, S)
print(f"focal length {model.focal_px:.2f} px")
for d, side in records:
    print(f"  d={d:4.0f} cm  side={side:5.1f} px  predicted {model.side_at(d):5.2f} px")

calib = CalibrationModel.centered(model.focal_px, S)
for feat in (RoiFeatures(120.0, 90.0, 25.0, 0.3), RoiFeatures(150.0, 70.0, 31.0, 0.3)):
    print(feat, "->", pixel_to_world(feat, calib))
