"""Generate a synthetic event stream and integrate it into frames."""

import numpy as np

from evtrack import CountBased, SceneSpec, SensorGeometry, generate, integrate_count
from evtrack.synth import densify_path

path = densify_path([(0, -8.0, 0.0, 60.0), (1_000_000, 8.0, 4.0, 50.0)], 10_000)
spec = SceneSpec(SensorGeometry(), 250.0, 6.0, tuple(path), 300_000.0, 15_000.0,
                 seed=1, edge_width_px=2)
stream, truth = generate(spec)
print(f"{len(stream)} events over {int(stream.t[-1]) / 1e6:.2f} s, {len(truth)} truth points")
print(f"positive polarity share: {stream.p.mean():.3f}")

frames = integrate_count(stream, CountBased().n)
print(f"{len(frames)} frames of {CountBased().n} events")
for img in frames[::20]:
    active = np.count_nonzero(img.counts)
    print(f"  t=[{img.first_t:>7d}, {img.last_t:>7d}]  active pixels {active:5d}  peak {img.counts.max()}")
