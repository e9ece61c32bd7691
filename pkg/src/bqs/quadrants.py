"""Per-quadrant bounding structures and the deviation bound formulas.

Each quadrant of the rotated local frame keeps a bounding box and a pair of
angular bounding lines over the points absorbed into it. From those, at most
eight significant points (box corners plus ray/box intersections) yield a
lower and upper bound on the maximum point-to-segment deviation without
touching the raw points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, NamedTuple, Optional, Tuple

from .geometry import Point, _segment_distance

_PI = math.pi
_HALF_PI = math.pi / 2.0

# Half-open angular ranges, keyed by quadrant id.
QUADRANT_RANGES = {
    1: (0.0, _HALF_PI),
    2: (_HALF_PI, _PI),
    3: (-_PI, -_HALF_PI),
    4: (-_HALF_PI, 0.0),
}


class BoundPair(NamedTuple):
    """Lower/upper sandwich on the maximum deviation of absorbed points."""

    d_lb: float
    d_ub: float


class LinePosition(Enum):
    """Where the candidate segment's direction falls relative to a quadrant."""

    IN_QUADRANT_BETWEEN_LINES = "between"
    IN_QUADRANT_OUTSIDE_LINES = "outside"
    NOT_IN_QUADRANT = "not_in"


def quadrant_of_angle(theta: float) -> int:
    """Quadrant id for a polar angle; angle pi folds onto -pi (Q3)."""
    if theta == _PI:
        theta = -_PI
    if theta >= 0.0:
        return 1 if theta < _HALF_PI else 2
    return 3 if theta < -_HALF_PI else 4


def widen_bounds(b: BoundPair, epsilon_prev: float) -> BoundPair:
    """Account for existing uncertainty: widen both bounds by 2*epsilon_prev.

    The lower bound is clamped at zero since distances are non-negative.
    """
    if epsilon_prev == 0.0:
        return b
    w = 2.0 * epsilon_prev
    return BoundPair(max(0.0, b.d_lb - w), b.d_ub + w)


def _ray_box_hits(cos_t: float, sin_t: float, min_x: float, max_x: float,
                  min_y: float, max_y: float) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    """Near and far intersection of the ray r*(cos_t, sin_t), r >= 0, with a box.

    The rays used here always pass through an absorbed point inside the box,
    so a nonempty intersection exists mathematically; a small slab padding
    absorbs the float rounding of tangent rays, and the results are clamped
    back into the box.
    """
    pad = 1e-12 * (1.0 + max(abs(min_x), abs(max_x), abs(min_y), abs(max_y)))
    lo = 0.0
    hi = math.inf
    for d, mn, mx in ((cos_t, min_x - pad, max_x + pad),
                      (sin_t, min_y - pad, max_y + pad)):
        if d != 0.0:
            a = mn / d
            b = mx / d
            if a > b:
                a, b = b, a
            if a > lo:
                lo = a
            if b < hi:
                hi = b
        elif not (mn <= 0.0 <= mx):
            lo, hi = math.inf, -math.inf
    if lo > hi:
        # Tangent ray lost to rounding: collapse to the closest slab point.
        lo = hi = 0.5 * (lo + hi) if math.isfinite(lo + hi) else 0.0
    near = (min(max(lo * cos_t, min_x), max_x), min(max(lo * sin_t, min_y), max_y))
    far = (min(max(hi * cos_t, min_x), max_x), min(max(hi * sin_t, min_y), max_y))
    return near, far


@dataclass
class QuadrantBounds:
    """Bounding box + angular bounding lines for one quadrant's points."""

    quadrant_id: int
    min_x: float = math.inf
    max_x: float = -math.inf
    min_y: float = math.inf
    max_y: float = -math.inf
    theta_lb: float = math.inf
    theta_ub: float = -math.inf
    point_count: int = 0
    _cache: Optional[tuple] = field(default=None, repr=False)

    def absorb(self, x: float, y: float, theta: float) -> None:
        """Grow the box and angular range to cover one more point."""
        if x < self.min_x:
            self.min_x = x
        if x > self.max_x:
            self.max_x = x
        if y < self.min_y:
            self.min_y = y
        if y > self.max_y:
            self.max_y = y
        if theta < self.theta_lb:
            self.theta_lb = theta
        if theta > self.theta_ub:
            self.theta_ub = theta
        self.point_count += 1
        self._cache = None

    def _structure(self) -> tuple:
        """Corners, ray hits, and near/far corner info (cached per shape)."""
        if self._cache is not None:
            return self._cache
        c = ((self.min_x, self.min_y), (self.max_x, self.min_y),
             (self.max_x, self.max_y), (self.min_x, self.max_y))
        l1, l2 = _ray_box_hits(math.cos(self.theta_lb), math.sin(self.theta_lb),
                               self.min_x, self.max_x, self.min_y, self.max_y)
        u1, u2 = _ray_box_hits(math.cos(self.theta_ub), math.sin(self.theta_ub),
                               self.min_x, self.max_x, self.min_y, self.max_y)
        d0 = tuple(math.hypot(px, py) for px, py in c)
        cn_i = min(range(4), key=d0.__getitem__)
        cf_i = max(range(4), key=d0.__getitem__)
        self._cache = (c, l1, l2, u1, u2, cn_i, cf_i, d0[cf_i])
        return self._cache

    def significant_points(self) -> List[Point]:
        """Distinct significant points (corners and ray hits), t set to 0."""
        if self.point_count == 0:
            return []
        c, l1, l2, u1, u2, _, _, _ = self._structure()
        seen: List[Tuple[float, float]] = []
        for p in (*c, l1, l2, u1, u2):
            if p not in seen:
                seen.append(p)
        return [Point(0.0, px, py) for px, py in seen]

    def near_far_corners(self) -> Tuple[Point, Point]:
        """Nearest and farthest box corner to the origin."""
        c, _, _, _, _, cn_i, cf_i, _ = self._structure()
        return Point(0.0, *c[cn_i]), Point(0.0, *c[cf_i])

    def classify_line(self, theta_se: float) -> LinePosition:
        """Position of a segment direction relative to this quadrant."""
        if quadrant_of_angle(theta_se) != self.quadrant_id:
            return LinePosition.NOT_IN_QUADRANT
        if self.theta_lb <= theta_se <= self.theta_ub:
            return LinePosition.IN_QUADRANT_BETWEEN_LINES
        return LinePosition.IN_QUADRANT_OUTSIDE_LINES

    def bound_pair(self, ex: float, ey: float) -> BoundPair:
        """Deviation bounds of this quadrant's points against segment (0,0)-(ex,ey)."""
        c, l1, l2, u1, u2, cn_i, cf_i, dist0_cf = self._structure()

        def d(p: Tuple[float, float]) -> float:
            return _segment_distance(p[0], p[1], 0.0, 0.0, ex, ey)

        dl1, dl2, du1, du2 = d(l1), d(l2), d(u1), d(u2)
        theta_se = math.atan2(ey, ex)
        if quadrant_of_angle(theta_se) == self.quadrant_id:
            d_corner = d(c[cn_i]) if math.hypot(ex, ey) < dist0_cf else d(c[cf_i])
            lb = max(min(dl1, dl2), min(du1, du2), d_corner)
            ub = max(dl1, dl2, du1, du2, d(c[cf_i]))
        else:
            dcs = sorted(d(p) for p in c)
            lb = max(min(dl1, dl2), min(du1, du2), dcs[1])
            ub = dcs[3]
        return BoundPair(lb, ub)
