"""Comparison compressors: Douglas-Peucker, buffered variants, dead reckoning.

All four take time-ordered points and return key points. DP is offline;
the buffered variants (BDP, BGD) window the stream and carry each window's
last key as the next window's start; dead reckoning keeps a point whenever
the linear position prediction from the last kept point drifts too far.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List

import math

import numpy as np

from .core import CompressedTrajectory
from .errors import EmptyInput, NeedsVelocity
from .geometry import Point, _segment_distance, segment_distances


@dataclass(frozen=True)
class BufferConfig:
    """Window capacity for the buffered compressors."""

    capacity: int = 32

    def __post_init__(self) -> None:
        if self.capacity < 3:
            raise ValueError("buffer capacity must be at least 3")


def _dp_mask(xs: np.ndarray, ys: np.ndarray, lo: int, hi: int,
             epsilon: float, keep: np.ndarray) -> None:
    """Mark kept indices of the classic split algorithm over [lo, hi]."""
    stack = [(lo, hi)]
    while stack:
        i, j = stack.pop()
        if j <= i + 1:
            continue
        d = segment_distances(xs[i + 1:j], ys[i + 1:j], xs[i], ys[i], xs[j], ys[j])
        k = int(np.argmax(d))
        if d[k] > epsilon:
            split = i + 1 + k
            keep[split] = True
            stack.append((i, split))
            stack.append((split, j))


def dp_compress(points: Iterable[Point], epsilon: float) -> CompressedTrajectory:
    """Offline split compression: deviation of dropped points stays within epsilon.

    The farthest point of an over-tolerance segment becomes a key and both
    halves are re-examined; ties go to the lowest index, so output is
    deterministic. Both endpoints are always kept.
    """
    pts = list(points)
    if len(pts) < 2:
        raise EmptyInput("at least two points are required")
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    xs = np.fromiter((p.x for p in pts), dtype=np.float64, count=len(pts))
    ys = np.fromiter((p.y for p in pts), dtype=np.float64, count=len(pts))
    keep = np.zeros(len(pts), dtype=bool)
    keep[0] = keep[-1] = True
    _dp_mask(xs, ys, 0, len(pts) - 1, epsilon, keep)
    return CompressedTrajectory([pts[i] for i in np.flatnonzero(keep)])


def bdp_compress(points: Iterable[Point], epsilon: float,
                 buf: BufferConfig = BufferConfig()) -> CompressedTrajectory:
    """Windowed split compression for streams.

    Each window carries the previous window's last key as its first point
    and fills with `capacity` new points before being handed to the split
    algorithm; its keys are emitted and its last point starts the next
    window. On a straight line of N points this keeps floor(N/capacity)+1.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    keys: List[Point] = []
    window: List[Point] = []
    for p in points:
        window.append(p)
        if len(window) == buf.capacity + 1:
            piece = dp_compress(window, epsilon)
            keys.extend(piece.keys if not keys else piece.keys[1:])
            window = [window[-1]]
    if len(window) >= 2:
        piece = dp_compress(window, epsilon)
        keys.extend(piece.keys if not keys else piece.keys[1:])
    if len(keys) < 2:
        raise EmptyInput("at least two points are required")
    return CompressedTrajectory(keys)


def bgd_compress(points: Iterable[Point], epsilon: float,
                 buf: BufferConfig = BufferConfig()) -> CompressedTrajectory:
    """Greedy full-deviation stream compression with a bounded buffer.

    Every arriving point closes a candidate segment from the last key; the
    buffered intermediates' maximum deviation is computed in full. On a
    breach the previous point becomes the key (its own arrival test proved
    that segment safe); a full buffer forces a key at the current point.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    it = iter(points)
    try:
        start = next(it)
    except StopIteration:
        raise EmptyInput("at least two points are required") from None
    keys: List[Point] = [start]
    buffer: List[Point] = []
    last = start
    for p in it:
        dev = max((_segment_distance(b.x, b.y, keys[-1].x, keys[-1].y, p.x, p.y)
                   for b in buffer), default=0.0)
        if dev > epsilon:
            keys.append(last)
            buffer = [p]
        else:
            buffer.append(p)
            if len(buffer) == buf.capacity:
                keys.append(p)
                buffer = []
        last = p
    if keys[-1].t != last.t:
        keys.append(last)
    if len(keys) < 2 and last.t == keys[0].t:
        raise EmptyInput("at least two points are required")
    return CompressedTrajectory(keys)


def dead_reckoning(points: Iterable[Point], epsilon: float) -> CompressedTrajectory:
    """Keep a point whenever linear prediction from the last kept point drifts.

    Prediction uses the position and instantaneous velocity recorded at the
    last kept point; dropped points sit within epsilon of that prediction.
    Points must carry velocity; a missing reading raises NeedsVelocity.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    it = iter(points)
    try:
        anchor = next(it)
    except StopIteration:
        raise EmptyInput("at least two points are required") from None
    if anchor.vx is None or anchor.vy is None:
        raise NeedsVelocity(f"point at t={anchor.t} has no velocity reading")
    keys: List[Point] = [anchor]
    last = anchor
    for p in it:
        dt = p.t - anchor.t
        ex = anchor.x + anchor.vx * dt
        ey = anchor.y + anchor.vy * dt
        if math.hypot(p.x - ex, p.y - ey) > epsilon:
            if p.vx is None or p.vy is None:
                raise NeedsVelocity(f"point at t={p.t} has no velocity reading")
            keys.append(p)
            anchor = p
        last = p
    if keys[-1].t != last.t:
        keys.append(last)
    if len(keys) < 2 and last.t == keys[0].t:
        raise EmptyInput("at least two points are required")
    return CompressedTrajectory(keys)
