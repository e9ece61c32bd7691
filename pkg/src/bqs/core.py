"""Streaming bounded-quadrant compressor state machines.

One CompressorState instance processes one stream segment by segment. Per
point it makes an include/stop decision from the quadrant deviation bounds,
falling back to a full deviation calculation over the retained buffer in
Buffered mode, or to a conservative stop in Fast mode. Progressive
re-compression of already-compressed keys widens every bound by twice the
existing tolerance.

Decision rules, in order, for an arriving point e:
  1. While no structure exists, a point within the trivial threshold of the
     segment origin is included outright: with the origin as a segment
     endpoint its deviation can never exceed the tolerance, wherever the
     segment ends. Once far points have been absorbed, near-origin arrivals
     go through the normal test; otherwise a later stop could key the
     segment at a point no test ever covered and break the error bound.
  2. Before rotation calibration the decision is an exact deviation check
     over the small calibration window (constant cost).
  3. After calibration the aggregated quadrant bounds decide; ties are
     broken by a full calculation (Buffered) or a conservative stop (Fast).

On a stop the key is the previous raw input, which becomes the next
segment's origin, and the offending point is re-processed as the first
input of the new segment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from .errors import TimeOrder, ToleranceOrder
from .geometry import Point, _segment_distance, segment_distances
from .quadrants import BoundPair, QuadrantBounds, quadrant_of_angle, widen_bounds

_PI = math.pi


class Mode(Enum):
    BUFFERED = "buffered"
    FAST = "fast"


class StepDecision(NamedTuple):
    """Outcome of one stream step."""

    kind: str  # "include" or "key_point"
    key: Optional[Point]
    used_full_calculation: bool

    @property
    def is_key(self) -> bool:
        return self.kind == "key_point"


_INCLUDE = StepDecision("include", None, False)


@dataclass
class Stats:
    decisive_count: int = 0
    full_calc_count: int = 0

    @property
    def total(self) -> int:
        return self.decisive_count + self.full_calc_count


@dataclass
class CompressedTrajectory:
    """Ordered key points; first and last source points always present."""

    keys: List[Point]

    def __len__(self) -> int:
        return len(self.keys)

    def __iter__(self):
        return iter(self.keys)

    @property
    def timestamps(self) -> List[float]:
        return [p.t for p in self.keys]


class CompressorState:
    """Per-segment machine: origin, rotation, quadrants, optional buffer."""

    def __init__(self, epsilon: float, *, mode: Mode = Mode.BUFFERED,
                 epsilon_prev: float = 0.0, r_init: int = 5) -> None:
        if epsilon <= 0.0:
            raise ValueError("epsilon must be positive")
        if epsilon_prev < 0.0:
            raise ValueError("epsilon_prev must be non-negative")
        if epsilon_prev > 0.0 and epsilon <= epsilon_prev:
            raise ToleranceOrder(
                f"new tolerance {epsilon} must exceed existing tolerance {epsilon_prev}")
        if r_init < 1:
            raise ValueError("r_init must be at least 1")
        self.epsilon = float(epsilon)
        self.epsilon_prev = float(epsilon_prev)
        self.trivial_threshold = max(0.0, self.epsilon - 2.0 * self.epsilon_prev)
        self.mode = mode
        self.r_init = r_init
        self.origin: Optional[Point] = None
        self.last: Optional[Point] = None
        self.rotation: Optional[float] = None
        self._cos_r = 1.0
        self._sin_r = 0.0
        self.rotation_buffer: List[Point] = []
        self.quadrants: Dict[int, QuadrantBounds] = {}
        self.buffer: Optional[List[Point]] = [] if mode is Mode.BUFFERED else None
        self.stats = Stats()
        self.peak_footprint = 0
        # Optional hook fired at every aggregated bound evaluation, with the
        # (possibly widened) pair and the world-frame segment (origin, e).
        self.bounds_hook: Optional[Callable[[BoundPair, Point, Point], None]] = None

    # -- introspection ---------------------------------------------------

    @property
    def calibrated(self) -> bool:
        return self.rotation is not None

    def state_footprint(self) -> int:
        """Retained point count: calibration window plus Buffered-mode buffer."""
        n = len(self.rotation_buffer)
        if self.buffer is not None:
            n += len(self.buffer)
        return n

    def _touch(self) -> None:
        f = self.state_footprint()
        if f > self.peak_footprint:
            self.peak_footprint = f

    # -- segment lifecycle -------------------------------------------------

    def _reset_segment(self, new_origin: Point) -> None:
        self.origin = new_origin
        self.rotation = None
        self._cos_r = 1.0
        self._sin_r = 0.0
        self.rotation_buffer.clear()
        self.quadrants.clear()
        if self.buffer is not None:
            self.buffer = []

    def _structure_empty(self) -> bool:
        return not self.rotation_buffer and not self.quadrants

    def _local(self, p: Point) -> Tuple[float, float]:
        dx = p.x - self.origin.x
        dy = p.y - self.origin.y
        return (self._cos_r * dx + self._sin_r * dy,
                -self._sin_r * dx + self._cos_r * dy)

    def _absorb(self, p: Point) -> None:
        lx, ly = self._local(p)
        theta = math.atan2(ly, lx)
        if theta == _PI:
            theta = -_PI
        qid = quadrant_of_angle(theta)
        q = self.quadrants.get(qid)
        if q is None:
            q = QuadrantBounds(qid)
            self.quadrants[qid] = q
        q.absorb(lx, ly, theta)

    def calibrate_rotation(self, p: Point) -> bool:
        """Add a non-exempt point to the calibration window.

        Returns True once the window is full: the rotation is set to the
        origin-to-centroid bearing and the window's points are replayed into
        the quadrants in the rotated frame.
        """
        self.rotation_buffer.append(p)
        if len(self.rotation_buffer) < self.r_init:
            return False
        n = len(self.rotation_buffer)
        cx = sum(b.x for b in self.rotation_buffer) / n - self.origin.x
        cy = sum(b.y for b in self.rotation_buffer) / n - self.origin.y
        self.rotation = math.atan2(cy, cx) if (cx != 0.0 or cy != 0.0) else 0.0
        self._cos_r = math.cos(self.rotation)
        self._sin_r = math.sin(self.rotation)
        for b in self.rotation_buffer:
            self._absorb(b)
        self.rotation_buffer.clear()
        return True

    # -- decision machinery --------------------------------------------------

    def _window_deviation(self, e: Point) -> float:
        if not self.rotation_buffer:
            return 0.0
        return max(_segment_distance(b.x, b.y, self.origin.x, self.origin.y, e.x, e.y)
                   for b in self.rotation_buffer)

    def _full_deviation(self, e: Point) -> float:
        if not self.buffer:
            return 0.0
        xs = np.fromiter((b.x for b in self.buffer), dtype=np.float64, count=len(self.buffer))
        ys = np.fromiter((b.y for b in self.buffer), dtype=np.float64, count=len(self.buffer))
        return float(segment_distances(xs, ys, self.origin.x, self.origin.y, e.x, e.y).max())

    def _aggregate_bounds(self, lx: float, ly: float) -> BoundPair:
        lb = 0.0
        ub = 0.0
        first = True
        for q in self.quadrants.values():
            pair = widen_bounds(q.bound_pair(lx, ly), self.epsilon_prev)
            if first:
                lb, ub = pair
                first = False
            else:
                if pair.d_lb > lb:
                    lb = pair.d_lb
                if pair.d_ub > ub:
                    ub = pair.d_ub
        return BoundPair(lb, ub)

    def _include(self, p: Point, exempt: bool) -> StepDecision:
        if not exempt:
            if self.buffer is not None:
                self.buffer.append(p)
            if self.calibrated:
                self._absorb(p)
            else:
                self.calibrate_rotation(p)
        self.last = p
        self._touch()
        return _INCLUDE

    def _stop(self, p: Point, used_full: bool) -> StepDecision:
        key = self.last
        self._reset_segment(key)
        inner = self._process(p, count=False)
        assert inner.kind == "include", "a fresh segment cannot stop on its first input"
        return StepDecision("key_point", key, used_full)

    def _process(self, p: Point, count: bool) -> StepDecision:
        d_origin = math.hypot(p.x - self.origin.x, p.y - self.origin.y)
        exempt = d_origin <= self.trivial_threshold
        if exempt and self._structure_empty():
            self.last = p
            return _INCLUDE

        if not self.calibrated:
            dev = self._window_deviation(p)
            if count:
                self.stats.decisive_count += 1
            if dev + 2.0 * self.epsilon_prev <= self.epsilon:
                return self._include(p, exempt)
            return self._stop(p, used_full=False)

        lx, ly = self._local(p)
        bounds = self._aggregate_bounds(lx, ly)
        if self.bounds_hook is not None:
            self.bounds_hook(bounds, self.origin, p)
        if bounds.d_ub <= self.epsilon:
            if count:
                self.stats.decisive_count += 1
            return self._include(p, exempt)
        if bounds.d_lb > self.epsilon:
            if count:
                self.stats.decisive_count += 1
            return self._stop(p, used_full=False)
        if self.mode is Mode.FAST:
            if count:
                self.stats.decisive_count += 1
            return self._stop(p, used_full=False)
        dev = self._full_deviation(p)
        if count:
            self.stats.full_calc_count += 1
        if dev + 2.0 * self.epsilon_prev <= self.epsilon:
            self._include(p, exempt)
            return StepDecision("include", None, True)
        return self._stop(p, used_full=True)

    def step(self, p: Point) -> StepDecision:
        """Feed one point; returns the include/key decision for it."""
        if self.last is not None and p.t <= self.last.t:
            raise TimeOrder(f"timestamp {p.t} does not advance past {self.last.t}")
        if self.origin is None:
            self.origin = p
            self.last = p
            return _INCLUDE
        return self._process(p, count=True)

    def flush(self) -> Optional[Point]:
        """Terminal key closing the stream: the last point seen, if any."""
        return self.last


def bqs_step(state: CompressorState, e: Point) -> StepDecision:
    """One Buffered-mode step (full deviation resolves uncertain bounds)."""
    if state.mode is not Mode.BUFFERED:
        raise ValueError("state is not in Buffered mode")
    return state.step(e)


def fbqs_step(state: CompressorState, e: Point) -> StepDecision:
    """One Fast-mode step (uncertain bounds stop conservatively)."""
    if state.mode is not Mode.FAST:
        raise ValueError("state is not in Fast mode")
    return state.step(e)


def _run(points, state: CompressorState) -> Tuple[CompressedTrajectory, CompressorState]:
    keys: List[Point] = []
    for p in points:
        dec = state.step(p)
        if not keys:
            keys.append(p)
        elif dec.is_key:
            keys.append(dec.key)
    tail = state.flush()
    if tail is not None and (not keys or keys[-1].t != tail.t):
        keys.append(tail)
    return CompressedTrajectory(keys), state


def bqs_compress(points, epsilon: float, *, r_init: int = 5) -> CompressedTrajectory:
    """Compress a stream with the buffered machine; error-bounded by epsilon."""
    traj, _ = _run(points, CompressorState(epsilon, mode=Mode.BUFFERED, r_init=r_init))
    return traj


def fbqs_compress(points, epsilon: float, *, r_init: int = 5) -> CompressedTrajectory:
    """Compress a stream with the fast (constant-space) machine."""
    traj, _ = _run(points, CompressorState(epsilon, mode=Mode.FAST, r_init=r_init))
    return traj


def pbqs_compress(keys, epsilon_prev: float, epsilon_new: float,
                  *, r_init: int = 5) -> CompressedTrajectory:
    """Re-compress already-compressed keys to a larger tolerance.

    Every bound is widened by 2*epsilon_prev before the decision, so the
    original raw points stay within epsilon_new of the output segments.
    With epsilon_prev = 0 this is exactly the fast machine.
    """
    if epsilon_new <= epsilon_prev:
        raise ToleranceOrder(
            f"new tolerance {epsilon_new} must exceed existing tolerance {epsilon_prev}")
    traj, _ = _run(keys, CompressorState(epsilon_new, mode=Mode.FAST,
                                         epsilon_prev=epsilon_prev, r_init=r_init))
    return traj


def compress_with_stats(points, epsilon: float, *, mode: Mode = Mode.BUFFERED,
                        epsilon_prev: float = 0.0, r_init: int = 5
                        ) -> Tuple[CompressedTrajectory, Stats, CompressorState]:
    """Like the compress drivers but also returns decision statistics."""
    state = CompressorState(epsilon, mode=mode, epsilon_prev=epsilon_prev, r_init=r_init)
    traj, _ = _run(points, state)
    return traj, state.stats, state
