"""Compiled array kernel for the fast (constant-space) compressor.

Mirrors the Fast-mode CompressorState decision for decision, operating on
plain float64 arrays and returning key indices. Intended for bulk runs and
in-place re-compression over array storage; the class-based machine remains
the reference implementation and the two are kept exactly equivalent by
tests.
"""

from __future__ import annotations

import math
from typing import Tuple

import numpy as np
from numba import njit

from .errors import TimeOrder, ToleranceOrder

_PI = math.pi
_HALF_PI = math.pi / 2.0


@njit(cache=True, inline="always")
def _seg_dist(px: float, py: float, sx: float, sy: float,
              ex: float, ey: float) -> float:
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


@njit(cache=True, inline="always")
def _quadrant_of(theta: float) -> int:
    if theta == _PI:
        theta = -_PI
    if theta >= 0.0:
        return 1 if theta < _HALF_PI else 2
    return 3 if theta < -_HALF_PI else 4


@njit(cache=True)
def _ray_hits(cos_t: float, sin_t: float, min_x: float, max_x: float,
              min_y: float, max_y: float) -> Tuple[float, float, float, float]:
    pad = 1e-12 * (1.0 + max(max(abs(min_x), abs(max_x)), max(abs(min_y), abs(max_y))))
    lo = 0.0
    hi = math.inf
    mn = min_x - pad
    mx = max_x + pad
    if cos_t != 0.0:
        a = mn / cos_t
        b = mx / cos_t
        if a > b:
            a, b = b, a
        if a > lo:
            lo = a
        if b < hi:
            hi = b
    elif not (mn <= 0.0 <= mx):
        lo = math.inf
        hi = -math.inf
    mn = min_y - pad
    mx = max_y + pad
    if sin_t != 0.0:
        a = mn / sin_t
        b = mx / sin_t
        if a > b:
            a, b = b, a
        if a > lo:
            lo = a
        if b < hi:
            hi = b
    elif not (mn <= 0.0 <= mx):
        lo = math.inf
        hi = -math.inf
    if lo > hi:
        s = lo + hi
        if math.isfinite(s):
            lo = 0.5 * s
        else:
            lo = 0.0
        hi = lo
    nx = min(max(lo * cos_t, min_x), max_x)
    ny = min(max(lo * sin_t, min_y), max_y)
    fx = min(max(hi * cos_t, min_x), max_x)
    fy = min(max(hi * sin_t, min_y), max_y)
    return nx, ny, fx, fy


@njit(cache=True)
def _fast_kernel(ts: np.ndarray, xs: np.ndarray, ys: np.ndarray,
                 eps: float, eps_prev: float, r_init: int
                 ) -> Tuple[np.ndarray, int]:
    """Fast-mode compression over arrays; returns (key indices, decisive count)."""
    n = ts.shape[0]
    out = np.empty(n if n > 0 else 1, np.int64)
    if n == 0:
        return out[:0], 0
    nk = 1
    out[0] = 0
    decisive = 0
    if n == 1:
        return out[:1], 0

    trivial = eps - 2.0 * eps_prev
    if trivial < 0.0:
        trivial = 0.0
    widen = 2.0 * eps_prev

    ox = xs[0]
    oy = ys[0]
    last_i = 0
    calibrated = False
    cos_r = 1.0
    sin_r = 0.0
    wx = np.empty(r_init, np.float64)
    wy = np.empty(r_init, np.float64)
    wn = 0

    # Per-quadrant box/angle state, indexed 1..4.
    qn = np.zeros(5, np.int64)
    qminx = np.empty(5, np.float64)
    qmaxx = np.empty(5, np.float64)
    qminy = np.empty(5, np.float64)
    qmaxy = np.empty(5, np.float64)
    qtlb = np.empty(5, np.float64)
    qtub = np.empty(5, np.float64)
    # Cached significant-point structure per quadrant.
    dirty = np.zeros(5, np.bool_)
    scx = np.empty((5, 4), np.float64)
    scy = np.empty((5, 4), np.float64)
    srx = np.empty((5, 4), np.float64)  # l1, l2, u1, u2 x
    sry = np.empty((5, 4), np.float64)
    scn = np.zeros(5, np.int64)
    scf = np.zeros(5, np.int64)
    sdcf = np.zeros(5, np.float64)

    for i in range(1, n):
        px = xs[i]
        py = ys[i]
        count = True
        while True:
            ddx = px - ox
            ddy = py - oy
            d0 = math.hypot(ddx, ddy)
            exempt = d0 <= trivial
            structure_empty = (wn == 0 and qn[1] == 0 and qn[2] == 0
                               and qn[3] == 0 and qn[4] == 0)
            if exempt and structure_empty:
                last_i = i
                break

            if not calibrated:
                dev = 0.0
                for j in range(wn):
                    dj = _seg_dist(wx[j], wy[j], ox, oy, px, py)
                    if dj > dev:
                        dev = dj
                if count:
                    decisive += 1
                if dev + widen <= eps:
                    if not exempt:
                        wx[wn] = px
                        wy[wn] = py
                        wn += 1
                        if wn >= r_init:
                            cx = 0.0
                            cy = 0.0
                            for j in range(wn):
                                cx += wx[j]
                                cy += wy[j]
                            cx = cx / wn - ox
                            cy = cy / wn - oy
                            if cx != 0.0 or cy != 0.0:
                                rot = math.atan2(cy, cx)
                            else:
                                rot = 0.0
                            cos_r = math.cos(rot)
                            sin_r = math.sin(rot)
                            calibrated = True
                            for j in range(wn):
                                bx = wx[j] - ox
                                by = wy[j] - oy
                                lx = cos_r * bx + sin_r * by
                                ly = -sin_r * bx + cos_r * by
                                theta = math.atan2(ly, lx)
                                if theta == _PI:
                                    theta = -_PI
                                q = _quadrant_of(theta)
                                if qn[q] == 0:
                                    qminx[q] = lx
                                    qmaxx[q] = lx
                                    qminy[q] = ly
                                    qmaxy[q] = ly
                                    qtlb[q] = theta
                                    qtub[q] = theta
                                else:
                                    if lx < qminx[q]:
                                        qminx[q] = lx
                                    if lx > qmaxx[q]:
                                        qmaxx[q] = lx
                                    if ly < qminy[q]:
                                        qminy[q] = ly
                                    if ly > qmaxy[q]:
                                        qmaxy[q] = ly
                                    if theta < qtlb[q]:
                                        qtlb[q] = theta
                                    if theta > qtub[q]:
                                        qtub[q] = theta
                                qn[q] += 1
                                dirty[q] = True
                            wn = 0
                    last_i = i
                    break
                out[nk] = last_i
                nk += 1
                ox = xs[last_i]
                oy = ys[last_i]
                calibrated = False
                wn = 0
                for q in range(1, 5):
                    qn[q] = 0
                count = False
                continue

            lx = cos_r * ddx + sin_r * ddy
            ly = -sin_r * ddx + cos_r * ddy
            agg_lb = 0.0
            agg_ub = 0.0
            first = True
            theta_se = math.atan2(ly, lx)
            q_se = _quadrant_of(theta_se)
            d_e = math.hypot(lx, ly)
            for q in range(1, 5):
                if qn[q] == 0:
                    continue
                if dirty[q]:
                    scx[q, 0] = qminx[q]
                    scy[q, 0] = qminy[q]
                    scx[q, 1] = qmaxx[q]
                    scy[q, 1] = qminy[q]
                    scx[q, 2] = qmaxx[q]
                    scy[q, 2] = qmaxy[q]
                    scx[q, 3] = qminx[q]
                    scy[q, 3] = qmaxy[q]
                    nx1, ny1, fx1, fy1 = _ray_hits(
                        math.cos(qtlb[q]), math.sin(qtlb[q]),
                        qminx[q], qmaxx[q], qminy[q], qmaxy[q])
                    srx[q, 0] = nx1
                    sry[q, 0] = ny1
                    srx[q, 1] = fx1
                    sry[q, 1] = fy1
                    nx2, ny2, fx2, fy2 = _ray_hits(
                        math.cos(qtub[q]), math.sin(qtub[q]),
                        qminx[q], qmaxx[q], qminy[q], qmaxy[q])
                    srx[q, 2] = nx2
                    sry[q, 2] = ny2
                    srx[q, 3] = fx2
                    sry[q, 3] = fy2
                    bn = 0
                    bf = 0
                    dn = math.hypot(scx[q, 0], scy[q, 0])
                    df = dn
                    for j in range(1, 4):
                        dj = math.hypot(scx[q, j], scy[q, j])
                        if dj < dn:
                            dn = dj
                            bn = j
                        if dj > df:
                            df = dj
                            bf = j
                    scn[q] = bn
                    scf[q] = bf
                    sdcf[q] = df
                    dirty[q] = False

                dl1 = _seg_dist(srx[q, 0], sry[q, 0], 0.0, 0.0, lx, ly)
                dl2 = _seg_dist(srx[q, 1], sry[q, 1], 0.0, 0.0, lx, ly)
                du1 = _seg_dist(srx[q, 2], sry[q, 2], 0.0, 0.0, lx, ly)
                du2 = _seg_dist(srx[q, 3], sry[q, 3], 0.0, 0.0, lx, ly)
                ml = dl1 if dl1 < dl2 else dl2
                mu = du1 if du1 < du2 else du2
                if q_se == q:
                    if d_e < sdcf[q]:
                        ci = scn[q]
                    else:
                        ci = scf[q]
                    dc = _seg_dist(scx[q, ci], scy[q, ci], 0.0, 0.0, lx, ly)
                    plb = ml
                    if mu > plb:
                        plb = mu
                    if dc > plb:
                        plb = dc
                    cf = scf[q]
                    dcf = _seg_dist(scx[q, cf], scy[q, cf], 0.0, 0.0, lx, ly)
                    pub = dl1
                    if dl2 > pub:
                        pub = dl2
                    if du1 > pub:
                        pub = du1
                    if du2 > pub:
                        pub = du2
                    if dcf > pub:
                        pub = dcf
                else:
                    dc0 = _seg_dist(scx[q, 0], scy[q, 0], 0.0, 0.0, lx, ly)
                    dc1 = _seg_dist(scx[q, 1], scy[q, 1], 0.0, 0.0, lx, ly)
                    dc2 = _seg_dist(scx[q, 2], scy[q, 2], 0.0, 0.0, lx, ly)
                    dc3 = _seg_dist(scx[q, 3], scy[q, 3], 0.0, 0.0, lx, ly)
                    # Insertion sort of the four corner distances.
                    if dc1 < dc0:
                        dc0, dc1 = dc1, dc0
                    if dc2 < dc1:
                        dc1, dc2 = dc2, dc1
                        if dc1 < dc0:
                            dc0, dc1 = dc1, dc0
                    if dc3 < dc2:
                        dc2, dc3 = dc3, dc2
                        if dc2 < dc1:
                            dc1, dc2 = dc2, dc1
                            if dc1 < dc0:
                                dc0, dc1 = dc1, dc0
                    plb = ml
                    if mu > plb:
                        plb = mu
                    if dc1 > plb:
                        plb = dc1
                    pub = dc3
                if eps_prev != 0.0:
                    plb -= widen
                    if plb < 0.0:
                        plb = 0.0
                    pub += widen
                if first:
                    agg_lb = plb
                    agg_ub = pub
                    first = False
                else:
                    if plb > agg_lb:
                        agg_lb = plb
                    if pub > agg_ub:
                        agg_ub = pub

            if count:
                decisive += 1
            if agg_ub <= eps:
                if not exempt:
                    theta = math.atan2(ly, lx)
                    if theta == _PI:
                        theta = -_PI
                    q = _quadrant_of(theta)
                    if qn[q] == 0:
                        qminx[q] = lx
                        qmaxx[q] = lx
                        qminy[q] = ly
                        qmaxy[q] = ly
                        qtlb[q] = theta
                        qtub[q] = theta
                    else:
                        if lx < qminx[q]:
                            qminx[q] = lx
                        if lx > qmaxx[q]:
                            qmaxx[q] = lx
                        if ly < qminy[q]:
                            qminy[q] = ly
                        if ly > qmaxy[q]:
                            qmaxy[q] = ly
                        if theta < qtlb[q]:
                            qtlb[q] = theta
                        if theta > qtub[q]:
                            qtub[q] = theta
                    qn[q] += 1
                    dirty[q] = True
                last_i = i
                break
            out[nk] = last_i
            nk += 1
            ox = xs[last_i]
            oy = ys[last_i]
            calibrated = False
            wn = 0
            for q in range(1, 5):
                qn[q] = 0
            count = False
            continue

    if out[nk - 1] != n - 1:
        out[nk] = n - 1
        nk += 1
    return out[:nk].copy(), decisive


def fast_key_indices(ts: np.ndarray, xs: np.ndarray, ys: np.ndarray,
                     epsilon: float, *, epsilon_prev: float = 0.0,
                     r_init: int = 5) -> Tuple[np.ndarray, int]:
    """Fast-mode key indices over arrays, plus the decision count.

    With epsilon_prev > 0 this is the progressive re-compression of
    already-compressed keys; inputs must be strictly time-ordered.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    if epsilon_prev < 0.0:
        raise ValueError("epsilon_prev must be non-negative")
    if epsilon_prev > 0.0 and epsilon <= epsilon_prev:
        raise ToleranceOrder(
            f"new tolerance {epsilon} must exceed existing tolerance {epsilon_prev}")
    if r_init < 1:
        raise ValueError("r_init must be at least 1")
    ts = np.ascontiguousarray(ts, dtype=np.float64)
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    ys = np.ascontiguousarray(ys, dtype=np.float64)
    if not (ts.shape == xs.shape == ys.shape) or ts.ndim != 1:
        raise ValueError("t, x, y must be one-dimensional arrays of equal length")
    if ts.size > 1 and np.any(np.diff(ts) <= 0.0):
        raise TimeOrder("timestamps must be strictly increasing")
    return _fast_kernel(ts, xs, ys, float(epsilon), float(epsilon_prev), int(r_init))


def warm_up() -> None:
    """Trigger kernel compilation so timed runs exclude it."""
    t = np.arange(8, dtype=np.float64)
    x = np.linspace(0.0, 7.0, 8)
    y = np.zeros(8)
    _fast_kernel(t, x, y, 1.0, 0.0, 5)
