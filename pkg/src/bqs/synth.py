"""Synthetic trajectory generators: correlated random walk and extreme shapes.

The walk alternates waiting events (position frozen) and moving events
(heading = previous heading plus a von Mises turn, speed lognormal,
duration exponential), sampled on a fixed time grid inside a bounding
square with reflecting walls.

Randomness comes from the PCG64 bit generator's uniform stream; every
variate is derived from it with an explicit transform (inverse CDF for
exponentials, Box-Muller for normals, Best-Fisher rejection for von Mises
angles), so a seed pins the output bit for bit across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from .errors import UnknownShape
from .geometry import Point

_TWO_PI = 2.0 * math.pi

SHAPE_KINDS = ("zigzag", "one_way", "commute", "spiral")


@dataclass(frozen=True)
class WalkConfig:
    """Correlated-walk parameters.

    Defaults model a 6 m/s traveller making long straight legs separated by
    wide turns and brief stops (legs of a couple of minutes, pauses of a few
    seconds). These defaults are the benchmark configuration the package's
    headline numbers are quoted against.
    """

    seed: int = 0
    bounds: float = 10000.0
    speed_mu: float = math.log(6.0)
    speed_sigma: float = 0.5
    turn_kappa: float = 0.8
    mean_move_time: float = 160.0
    mean_wait_time: float = 3.0
    sample_interval: float = 1.0
    n_points: int = 30000
    noise_sigma: float = 0.0

    def __post_init__(self) -> None:
        for name in ("bounds", "speed_sigma", "turn_kappa", "mean_move_time",
                     "mean_wait_time", "sample_interval"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.n_points < 2:
            raise ValueError("n_points must be at least 2")
        if self.noise_sigma < 0.0:
            raise ValueError("noise_sigma must be nonnegative")


def _exponential(u: Callable[[], float], mean: float) -> float:
    return -mean * math.log(1.0 - u())


def _standard_normal(u: Callable[[], float]) -> float:
    return math.sqrt(-2.0 * math.log(1.0 - u())) * math.cos(_TWO_PI * u())


def von_mises_angle(u: Callable[[], float], kappa: float) -> float:
    """Best-Fisher rejection sample of a zero-mean von Mises angle."""
    if kappa <= 1e-8:
        return -math.pi + _TWO_PI * u()
    a = 1.0 + math.sqrt(1.0 + 4.0 * kappa * kappa)
    b = (a - math.sqrt(2.0 * a)) / (2.0 * kappa)
    r = (1.0 + b * b) / (2.0 * b)
    while True:
        z = math.cos(math.pi * u())
        f = (1.0 + r * z) / (r + z)
        c = kappa * (r - f)
        u2 = u()
        if c * (2.0 - c) - u2 > 0.0:
            break
        if u2 > 0.0 and math.log(c / u2) + 1.0 - c >= 0.0:
            break
    f = max(-1.0, min(1.0, f))
    return math.copysign(math.acos(f), u() - 0.5)


def _wrap_angle(theta: float) -> float:
    theta = math.fmod(theta + math.pi, _TWO_PI)
    if theta < 0.0:
        theta += _TWO_PI
    return theta - math.pi


def correlated_walk(cfg: WalkConfig) -> List[Point]:
    """Sample the event-based correlated walk on cfg's fixed time grid.

    Returns n_points samples with instantaneous velocity annotations;
    waiting samples carry zero velocity. Positions stay inside
    [0, bounds]^2 via reflection, starting from the square's centre.
    With noise_sigma > 0 each sampled position gets independent Gaussian
    measurement jitter drawn from a separate stream, so for a given seed
    the underlying path, timestamps, and velocities are identical at every
    noise level (and the noise-free walk is unchanged by the knob).
    """
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    u = rng.random
    sigma = cfg.noise_sigma
    nu = np.random.Generator(np.random.PCG64(cfg.seed).jumped()).random

    def place(t: float, px: float, py: float, vx: float, vy: float) -> Point:
        if sigma > 0.0:
            px += sigma * _standard_normal(nu)
            py += sigma * _standard_normal(nu)
        return Point(t, px, py, vx, vy)

    L = cfg.bounds
    x = y = L / 2.0
    heading = -math.pi + _TWO_PI * u()
    out: List[Point] = []
    t_now = 0.0
    next_t = 0.0
    dt = cfg.sample_interval
    n = cfg.n_points
    moving = True
    while len(out) < n:
        if moving:
            heading = _wrap_angle(heading + von_mises_angle(u, cfg.turn_kappa))
            speed = math.exp(cfg.speed_mu + cfg.speed_sigma * _standard_normal(u))
            t_end = t_now + _exponential(u, cfg.mean_move_time)
            while t_now < t_end and len(out) < n:
                vx = speed * math.cos(heading)
                vy = speed * math.sin(heading)
                tx = math.inf
                if vx > 0.0:
                    tx = (L - x) / vx
                elif vx < 0.0:
                    tx = -x / vx
                ty = math.inf
                if vy > 0.0:
                    ty = (L - y) / vy
                elif vy < 0.0:
                    ty = -y / vy
                step_end = min(t_end, t_now + min(tx, ty))
                while next_t < step_end and len(out) < n:
                    frac = next_t - t_now
                    out.append(place(next_t, x + vx * frac, y + vy * frac, vx, vy))
                    next_t += dt
                x += vx * (step_end - t_now)
                y += vy * (step_end - t_now)
                t_now = step_end
                if t_now < t_end:
                    # A wall was hit mid-move: snap onto it and bounce.
                    if tx <= ty:
                        x = L if vx > 0.0 else 0.0
                        heading = math.pi - heading
                    if ty <= tx:
                        y = L if vy > 0.0 else 0.0
                        heading = -heading
                    heading = _wrap_angle(heading)
        else:
            t_end = t_now + _exponential(u, cfg.mean_wait_time)
            while next_t < t_end and len(out) < n:
                out.append(place(next_t, x, y, 0.0, 0.0))
                next_t += dt
            t_now = t_end
        moving = not moving
    return out


def shape(kind: str, n: int) -> List[Point]:
    """One of the extreme deterministic shapes, n points at 1 s spacing.

    zigzag alternates between the horizontal and vertical half-unit lines
    with growing coordinates; one_way is a straight line; commute bounces
    along a straight line; spiral traces rho = 1 + 2*theta over ten pi
    radians. Coordinates are meters.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    pts: List[Point] = []
    if kind == "zigzag":
        for i in range(n):
            if i % 2 == 0:
                pts.append(Point(float(i), float(i + 1), 0.5))
            else:
                pts.append(Point(float(i), 0.5, float(i + 1)))
    elif kind == "one_way":
        for i in range(n):
            pts.append(Point(float(i), float(i + 1), 0.5))
    elif kind == "commute":
        span = max(2, round((n + 3) / 4))
        x = 1
        direction = 1
        for i in range(n):
            pts.append(Point(float(i), float(x), 0.5))
            if x + direction > span or x + direction < 1:
                direction = -direction
            x += direction
    elif kind == "spiral":
        theta_max = 10.0 * math.pi
        for i in range(n):
            theta = theta_max * i / (n - 1)
            rho = 1.0 + 2.0 * theta
            pts.append(Point(float(i), rho * math.cos(theta), rho * math.sin(theta)))
    else:
        raise UnknownShape(f"unknown shape kind {kind!r}; expected one of {SHAPE_KINDS}")
    return pts
