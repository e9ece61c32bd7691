"""Planar geometric primitives: projection, distances, angles, rotation.

All distances are meters, angles radians, timestamps seconds. Streams are
projected once onto a local tangent plane and every algorithm works in that
plane with double precision.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Optional

import numpy as np

from .errors import DegenerateAngle

EARTH_RADIUS = 6371000.0


class Point(NamedTuple):
    """Timestamped planar location, optionally annotated with velocity."""

    t: float
    x: float
    y: float
    vx: Optional[float] = None
    vy: Optional[float] = None


class GeoPoint(NamedTuple):
    """Timestamped geographic location in degrees."""

    t: float
    lat: float
    lon: float


class SegmentLine(NamedTuple):
    """Line segment between two points; s == e is a legal degenerate line."""

    s: Point
    e: Point


def project(origin: GeoPoint, p: GeoPoint) -> Point:
    """Project a geographic point onto the tangent plane anchored at origin.

    Equirectangular: x = R*cos(origin.lat)*dlon, y = R*dlat (radians).
    Locally metric at the spatial scales of a single trip; not valid
    across continental distances.
    """
    dlat = math.radians(p.lat - origin.lat)
    dlon = math.radians(p.lon - origin.lon)
    x = EARTH_RADIUS * math.cos(math.radians(origin.lat)) * dlon
    y = EARTH_RADIUS * dlat
    return Point(p.t, x, y)


def _segment_distance(px: float, py: float, sx: float, sy: float,
                      ex: float, ey: float) -> float:
    """Distance from (px, py) to the closed segment (sx, sy)-(ex, ey)."""
    dx = ex - sx
    dy = ey - sy
    wx = px - sx
    wy = py - sy
    vv = dx * dx + dy * dy
    if vv == 0.0:
        return math.hypot(wx, wy)
    u = (wx * dx + wy * dy) / vv
    if u <= 0.0:
        return math.hypot(wx, wy)
    if u >= 1.0:
        return math.hypot(px - ex, py - ey)
    return math.hypot(wx - u * dx, wy - u * dy)


def point_to_segment_distance(p: Point, seg: SegmentLine) -> float:
    """Euclidean distance from p to the closest point of the closed segment."""
    return _segment_distance(p.x, p.y, seg.s.x, seg.s.y, seg.e.x, seg.e.y)


def segment_distances(xs: np.ndarray, ys: np.ndarray, sx: float, sy: float,
                      ex: float, ey: float) -> np.ndarray:
    """Vectorized distance from many points to one closed segment."""
    dx = ex - sx
    dy = ey - sy
    wx = xs - sx
    wy = ys - sy
    vv = dx * dx + dy * dy
    if vv == 0.0:
        return np.hypot(wx, wy)
    u = np.clip((wx * dx + wy * dy) / vv, 0.0, 1.0)
    return np.hypot(wx - u * dx, wy - u * dy)


def polar_angle(origin: Point, p: Point) -> float:
    """Angle in (-pi, pi] of the vector p - origin w.r.t. the +x axis."""
    dx = p.x - origin.x
    dy = p.y - origin.y
    if dx == 0.0 and dy == 0.0:
        raise DegenerateAngle(f"polar angle undefined for coincident points at ({p.x}, {p.y})")
    a = math.atan2(dy, dx)
    if a == -math.pi:
        a = math.pi
    return a


def rotate_about(p: Point, origin: Point, angle: float) -> Point:
    """Rigid rotation of p about origin; timestamp and velocity preserved."""
    c = math.cos(angle)
    s = math.sin(angle)
    dx = p.x - origin.x
    dy = p.y - origin.y
    return Point(p.t, origin.x + c * dx - s * dy, origin.y + s * dx + c * dy, p.vx, p.vy)
