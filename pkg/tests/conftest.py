import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from evtrack.events import EventStream, SensorGeometry  # noqa: E402


def random_stream(rng, n, geometry=SensorGeometry(), t_max=2**32 - 1):
    """Valid random stream: uniform pixels, sorted timestamps (ties allowed)."""
    t = np.sort(rng.integers(0, t_max, size=n, dtype=np.uint64, endpoint=True))
    return EventStream(
        geometry,
        rng.integers(0, geometry.width, size=n),
        rng.integers(0, geometry.height, size=n),
        t,
        rng.integers(0, 2, size=n),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20211)


# one summary line per acceptance criterion, filled by test_acceptance.record()
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(line)
