"""Shared fixtures: cached synthetic streams and a brute-force oracle."""

import numpy as np
import pytest

from bqs.geometry import Point, segment_distances
from bqs.synth import WalkConfig, correlated_walk

_walk_cache = {}


def cached_walk(seed: int, n: int, **kwargs):
    key = (seed, n, tuple(sorted(kwargs.items())))
    if key not in _walk_cache:
        _walk_cache[key] = correlated_walk(
            WalkConfig(seed=seed, n_points=n, **kwargs))
    return _walk_cache[key]


@pytest.fixture(scope="session")
def walk():
    """walk(seed, n, **cfg) -> cached correlated walk."""
    return cached_walk


def brute_max_deviation(points, keys):
    """Independent oracle: max distance from each point to its covering
    segment, segments chosen by timestamp."""
    kt = np.array([k.t for k in keys])
    kx = np.array([k.x for k in keys])
    ky = np.array([k.y for k in keys])
    worst = 0.0
    for p in points:
        j = int(np.searchsorted(kt, p.t, side="right") - 1)
        j = min(max(j, 0), len(kt) - 2)
        d = segment_distances(np.array([p.x]), np.array([p.y]),
                              kx[j], ky[j], kx[j + 1], ky[j + 1])[0]
        worst = max(worst, float(d))
    return worst


@pytest.fixture(scope="session")
def oracle_deviation():
    return brute_max_deviation


def jagged_points(rng, n, step=5.0):
    """Small random walk with abrupt turns; cheap stress stream for machines."""
    angles = rng.uniform(-np.pi, np.pi, n).cumsum() * 0.35
    xs = np.cumsum(step * np.cos(angles))
    ys = np.cumsum(step * np.sin(angles))
    return [Point(float(i), float(x), float(y)) for i, (x, y) in enumerate(zip(xs, ys))]


@pytest.fixture()
def make_jagged():
    def make(seed, n, step=5.0):
        return jagged_points(np.random.default_rng(seed), n, step)
    return make
