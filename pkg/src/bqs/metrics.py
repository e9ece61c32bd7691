"""Evaluation metrics and time-based reconstruction for compressed trajectories.

Reconstruction interpolates linearly between the covering key pair at a
query timestamp. Error metrics compare the original stream against that
reconstruction (time-synchronized and decay-weighted variants) or against
the covering key segments (maximum deviation).
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .core import CompressedTrajectory
from .errors import EmptyInput, OutOfRange
from .geometry import Point, segment_distances


@dataclass(frozen=True)
class MetricReport:
    """One run's evaluation summary."""

    compression_rate: float
    pruning_power: float
    max_deviation: float
    mean_sync_error: float
    decayed_sync_error: float
    key_count: int
    input_count: int
    wall_time: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.compression_rate <= 1.0:
            raise ValueError("compression_rate must be within [0, 1]")
        if not 0.0 <= self.pruning_power <= 1.0:
            raise ValueError("pruning_power must be within [0, 1]")
        if self.key_count > self.input_count:
            raise ValueError("key_count cannot exceed input_count")


def compression_rate(kept: int, original: int) -> float:
    """Kept-to-original point ratio; lower is better."""
    if original == 0:
        raise EmptyInput("original point count is zero")
    if kept > original:
        raise ValueError("kept cannot exceed original")
    return kept / original


def pruning_power(full_calcs: int, total: int) -> float:
    """Share of decisions made without a full deviation calculation."""
    if total == 0:
        raise EmptyInput("total decision count is zero")
    if full_calcs > total:
        raise ValueError("full_calcs cannot exceed total")
    return 1.0 - full_calcs / total


def reconstruct(traj: CompressedTrajectory, t: float) -> Point:
    """Linear interpolation between the covering key pair at timestamp t.

    Exact at key timestamps. Raises OutOfRange outside the key time span.
    """
    keys = traj.keys
    if not keys:
        raise EmptyInput("trajectory has no keys")
    if t < keys[0].t or t > keys[-1].t:
        raise OutOfRange(f"timestamp {t} outside [{keys[0].t}, {keys[-1].t}]")
    ts = traj.timestamps
    i = bisect.bisect_right(ts, t) - 1
    if i == len(keys) - 1:
        return keys[-1]
    a, b = keys[i], keys[i + 1]
    if t == a.t:
        return a
    frac = (t - a.t) / (b.t - a.t)
    return Point(t, a.x + frac * (b.x - a.x), a.y + frac * (b.y - a.y))


def _arrays(points: Sequence[Point]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = len(points)
    ts = np.fromiter((p.t for p in points), dtype=np.float64, count=n)
    xs = np.fromiter((p.x for p in points), dtype=np.float64, count=n)
    ys = np.fromiter((p.y for p in points), dtype=np.float64, count=n)
    return ts, xs, ys


def max_deviation_error(original: Sequence[Point], traj: CompressedTrajectory) -> float:
    """Largest distance from any original point to its covering key segment.

    Timestamps outside the key span are scored against the nearest end
    segment.
    """
    if not original:
        raise EmptyInput("no original points")
    if not traj.keys:
        raise EmptyInput("trajectory has no keys")
    ts, xs, ys = _arrays(original)
    kt, kx, ky = _arrays(traj.keys)
    if len(traj.keys) == 1:
        return float(np.hypot(xs - kx[0], ys - ky[0]).max())
    idx = np.clip(np.searchsorted(kt, ts, side="right") - 1, 0, len(kt) - 2)
    worst = 0.0
    for seg in np.unique(idx):
        m = idx == seg
        d = segment_distances(xs[m], ys[m], kx[seg], ky[seg], kx[seg + 1], ky[seg + 1])
        worst = max(worst, float(d.max()))
    return worst


def time_sync_error(original: Sequence[Point],
                    traj: CompressedTrajectory) -> Tuple[List[float], float]:
    """Per-timestamp distance to the reconstruction, and its mean.

    Timestamps outside the surviving key span (overwritten or lost data)
    are scored against the nearest surviving key position.
    """
    if not original:
        raise EmptyInput("no original points")
    if not traj.keys:
        raise EmptyInput("trajectory has no keys")
    ts, xs, ys = _arrays(original)
    kt, kx, ky = _arrays(traj.keys)
    rx = np.interp(ts, kt, kx)
    ry = np.interp(ts, kt, ky)
    errs = np.hypot(xs - rx, ys - ry)
    return errs.tolist(), float(errs.mean())


def decayed_error(errors: Sequence[float]) -> float:
    """Mean error with linear recency weighting: e_i * (0.8*i/N + 0.2), i=1..N."""
    n = len(errors)
    if n == 0:
        raise EmptyInput("no errors to weight")
    e = np.asarray(errors, dtype=np.float64)
    i = np.arange(1, n + 1, dtype=np.float64)
    return float(np.mean(e * (0.8 * i / n + 0.2)))


def smooth(series: Sequence[float], window: int = 1000) -> List[float]:
    """Trailing moving average for report series; shorter prefixes shrink."""
    if window < 1:
        raise ValueError("window must be at least 1")
    a = np.asarray(series, dtype=np.float64)
    if a.size == 0:
        return []
    c = np.concatenate(([0.0], np.cumsum(a)))
    n = a.size
    hi = np.arange(1, n + 1)
    lo = np.maximum(hi - window, 0)
    return ((c[hi] - c[lo]) / (hi - lo)).tolist()


def evaluate(original: Sequence[Point], traj: CompressedTrajectory, *,
             full_calcs: int = 0, decisions: int = 0,
             wall_time: float = 0.0) -> MetricReport:
    """Bundle the standard metrics for one compression run."""
    errs, mean_err = time_sync_error(original, traj)
    pp = pruning_power(full_calcs, decisions) if decisions > 0 else 0.0
    return MetricReport(
        compression_rate=compression_rate(len(traj.keys), len(original)),
        pruning_power=pp,
        max_deviation=max_deviation_error(original, traj),
        mean_sync_error=mean_err,
        decayed_sync_error=decayed_error(errs),
        key_count=len(traj.keys),
        input_count=len(original),
        wall_time=wall_time,
    )
