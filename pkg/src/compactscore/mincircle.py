"""Smallest enclosing circle of a point set.

Randomized incremental algorithm (expected linear time): points are shuffled,
then the circle is grown whenever a point falls outside, re-solving with that
point pinned to the boundary. A circle is always determined by at most three
support points. Scans for the next violating point are vectorized.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError
from .geom import Circle, MultiPolygon, Point

DEFAULT_SEED = 20150714

_REL_EPS = {np.dtype(np.float32): 1e-5, np.dtype(np.float64): 1e-12}


def _first_outside(pts, cx, cy, r2, start, eps):
    """Index of the first point at squared distance > r2*(1+eps), or -1."""
    if start >= len(pts):
        return -1
    dx = pts[start:, 0] - cx
    dy = pts[start:, 1] - cy
    out = np.nonzero(dx * dx + dy * dy > r2 * (1.0 + eps))[0]
    if len(out) == 0:
        return -1
    return start + int(out[0])


def _circle_two(p, q):
    cx = (p[0] + q[0]) / 2.0
    cy = (p[1] + q[1]) / 2.0
    dx = p[0] - cx
    dy = p[1] - cy
    return cx, cy, dx * dx + dy * dy


def _circle_three(p, q, r):
    """Circumcircle through three points, or None when collinear."""
    ax, ay = p
    bx, by = q
    cx, cy = r
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if d == 0.0:
        return None
    a2 = ax * ax + ay * ay
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d
    uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d
    dx = ax - ux
    dy = ay - uy
    return ux, uy, dx * dx + dy * dy


def _circle_two_pinned(pts, p, q, eps):
    """Smallest circle containing pts[:] with p and q on the boundary."""
    cx, cy, r2 = _circle_two(p, q)
    left = None
    right = None
    px, py = p
    qx, qy = q
    dx = pts[:, 0] - cx
    dy = pts[:, 1] - cy
    outside = np.nonzero(dx * dx + dy * dy > r2 * (1.0 + eps))[0]
    for i in outside:
        s = pts[i]
        cross = (qx - px) * (s[1] - py) - (qy - py) * (s[0] - px)
        c = _circle_three(p, q, (s[0], s[1]))
        if c is None:
            continue
        ccross = (qx - px) * (c[1] - py) - (qy - py) * (c[0] - px)
        if cross > 0.0 and (left is None or ccross > (qx - px) * (left[1] - py) - (qy - py) * (left[0] - px)):
            left = c
        elif cross < 0.0 and (right is None or ccross < (qx - px) * (right[1] - py) - (qy - py) * (right[0] - px)):
            right = c
    if left is None and right is None:
        return cx, cy, r2
    if left is None:
        return right
    if right is None:
        return left
    return left if left[2] <= right[2] else right


def _circle_one_pinned(pts, p, eps):
    """Smallest circle containing pts[:] with p on the boundary."""
    cx, cy, r2 = p[0], p[1], 0.0
    start = 0
    while True:
        j = _first_outside(pts, cx, cy, r2, start, eps)
        if j < 0:
            return cx, cy, r2
        q = (pts[j, 0], pts[j, 1])
        if r2 == 0.0:
            cx, cy, r2 = _circle_two(p, q)
        else:
            cx, cy, r2 = _circle_two_pinned(pts[:j + 1], p, q, eps)
        start = j + 1


def min_circle_of_points(points, seed: int = DEFAULT_SEED, dtype=np.float64) -> Circle:
    """Smallest circle enclosing the given points."""
    pts = np.asarray(points, dtype=dtype)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) == 0:
        raise InvalidInputError("need a non-empty (n, 2) point set")
    if len(pts) > 512:
        # the support points lie on the convex hull; shrink large inputs
        from .errors import DegenerateHullError
        from .geom import hull_of_points
        try:
            pts = hull_of_points(pts).astype(dtype)
        except DegenerateHullError:
            pass
    eps = _REL_EPS[np.dtype(dtype)]
    rng = np.random.default_rng(seed)
    pts = pts[rng.permutation(len(pts))]
    p0 = (pts[0, 0], pts[0, 1])
    cx, cy, r2 = p0[0], p0[1], 0.0
    start = 1
    while True:
        j = _first_outside(pts, cx, cy, r2, start, eps)
        if j < 0:
            break
        cx, cy, r2 = _circle_one_pinned(pts[:j + 1], (pts[j, 0], pts[j, 1]), eps)
        start = j + 1
    return Circle(Point(float(cx), float(cy)), float(np.sqrt(r2)))


def min_enclosing_circle(mp: MultiPolygon, parts: str = "PT",
                         seed: int = DEFAULT_SEED, dtype=np.float64):
    """Smallest circle over all outer-ring points (PT) or one per part (PS)."""
    if mp.is_empty:
        raise InvalidInputError("empty MultiPolygon")
    from .geom import outer_points
    if parts == "PT":
        return min_circle_of_points(outer_points(mp), seed=seed, dtype=dtype)
    if parts == "PS":
        return tuple(min_circle_of_points(p.outer.coords, seed=seed, dtype=dtype)
                     for p in mp.parts)
    raise InvalidInputError(f"parts must be PT or PS, got {parts!r}")
