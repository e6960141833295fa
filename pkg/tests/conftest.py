import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# filled by tests/test_acceptance.py, printed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def probes_away(points, count=64, clearance=0.3):
    """Uniform angles at least ``clearance`` from every point."""
    grid = -math.pi + 2 * math.pi * (np.arange(8 * count) + 0.5) / (8 * count)
    pts = np.asarray(points, dtype=float)
    if pts.size:
        dist = np.min(np.abs(np.angle(np.exp(1j * (grid[:, None] - pts[None, :])))), axis=1)
        grid = grid[dist >= clearance]
    idx = np.linspace(0, grid.size - 1, min(count, grid.size)).round().astype(int)
    return grid[idx]


@pytest.fixture(scope="session")
def recon_cache():
    """Reconstructions shared across test modules (they dominate runtime)."""
    from circlechain import catalog, reconstruct

    cache = {}

    def get(name, K=256, reduce=False, **kw):
        key = (name, K, reduce, tuple(sorted(kw.items())))
        if key not in cache:
            cache[key] = reconstruct(catalog.get(name).sectioned(), K, reduce=reduce, **kw)
        return cache[key]

    return get
