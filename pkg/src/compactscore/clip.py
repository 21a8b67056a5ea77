"""Boolean intersection of polygon sets.

Strategy: decompose any non-convex or holed operand into horizontal
trapezoids (one strip per interval between consecutive distinct vertex
y-values, paired by even-odd crossing counts at the strip midline), then clip
convex pieces against convex pieces with Sutherland-Hodgman. Midlines never
pass through a vertex, so coincident and axis-aligned edges need no special
cases. The result is a MultiPolygon of interior-disjoint convex pieces whose
summed area is the intersection area.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidGeometryError
from .geom import MultiPolygon, PolygonPart, Ring

__all__ = ["intersect", "intersection_area"]


def _ring_is_convex(coords: np.ndarray) -> bool:
    a = coords
    b = np.roll(a, -1, axis=0)
    c = np.roll(a, -2, axis=0)
    cross = (b[:, 0] - a[:, 0]) * (c[:, 1] - b[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - b[:, 0])
    return bool(np.all(cross >= 0.0))


def _convex_parts(mp: MultiPolygon):
    """Outer coordinate arrays if every part is convex and hole-free, else None."""
    out = []
    for part in mp.parts:
        if part.holes or not _ring_is_convex(part.outer.coords):
            return None
        out.append(part.outer.coords)
    return out


def _edge_x_at(e, y):
    x0, y0, x1, y1 = e
    return x0 + (x1 - x0) * ((y - y0) / (y1 - y0))


def _trapezoids(part: PolygonPart, dtype) -> list:
    """Interior-disjoint convex quads covering the part (holes carved out)."""
    rings = [r.coords.astype(dtype) for r in part.rings]
    edges = np.vstack([np.column_stack([r, np.roll(r, -1, axis=0)]) for r in rings])
    x0, y0, x1, y1 = edges[:, 0], edges[:, 1], edges[:, 2], edges[:, 3]
    ylo = np.minimum(y0, y1)
    yhi = np.maximum(y0, y1)
    ys = np.unique(np.concatenate([y0, y1]))
    pieces = []
    for k in range(len(ys) - 1):
        ya, yb = ys[k], ys[k + 1]
        ym = (ya + yb) * 0.5
        if not (ya < ym < yb):
            continue
        idx = np.nonzero((ylo < ym) & (yhi > ym))[0]
        if len(idx) == 0:
            continue
        if len(idx) % 2:
            raise InvalidGeometryError("open boundary: odd crossing count in strip")
        xm = _edge_x_at((x0[idx], y0[idx], x1[idx], y1[idx]), ym)
        idx = idx[np.argsort(xm, kind="stable")]
        for m in range(0, len(idx), 2):
            el = edges[idx[m]]
            er = edges[idx[m + 1]]
            quad = np.array([
                [_edge_x_at(el, ya), ya],
                [_edge_x_at(er, ya), ya],
                [_edge_x_at(er, yb), yb],
                [_edge_x_at(el, yb), yb],
            ], dtype=dtype)
            if _piece_area(quad) > 0.0:
                pieces.append(quad)
    return pieces


def _piece_area(coords: np.ndarray) -> float:
    x, y = coords[:, 0], coords[:, 1]
    return float(0.5 * (x @ np.roll(y, -1) - y @ np.roll(x, -1)))


def _interp(p, q, dp, dq):
    t = dp / (dp - dq)
    return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))


def _clip_once(out: np.ndarray, ax, ay, bx, by, dtype):
    """Clip a polygon against one half-plane (left of a->b). Returns array or None."""
    ex = bx - ax
    ey = by - ay
    d = ex * (out[:, 1] - ay) - ey * (out[:, 0] - ax)
    inside = d >= 0.0
    if inside.all():
        return out
    if not inside.any():
        return None
    n = len(out)
    flips = np.nonzero(inside != np.roll(inside, -1))[0]
    if len(flips) == 2:
        f1, f2 = int(flips[0]), int(flips[1])
        ent, ext = (f1, f2) if inside[(f1 + 1) % n] else (f2, f1)
        pe = _interp(out[ent], out[(ent + 1) % n], d[ent], d[(ent + 1) % n])
        px = _interp(out[ext], out[(ext + 1) % n], d[ext], d[(ext + 1) % n])
        if ent < ext:
            mids = out[ent + 1:ext + 1]
        else:
            mids = np.vstack([out[ent + 1:], out[:ext + 1]])
        return np.vstack([np.array([pe], dtype=dtype), mids, np.array([px], dtype=dtype)])
    res = []
    for i in range(n):
        j = (i + 1) % n
        if inside[i]:
            res.append((out[i, 0], out[i, 1]))
            if not inside[j]:
                res.append(_interp(out[i], out[j], d[i], d[j]))
        elif inside[j]:
            res.append(_interp(out[i], out[j], d[i], d[j]))
    return np.array(res, dtype=dtype) if len(res) >= 3 else None


def _clip_convex(subject: np.ndarray, clip: np.ndarray, dtype):
    """Sutherland-Hodgman: subject clipped to a convex CCW clip polygon."""
    out = subject
    m = len(clip)
    for e in range(m):
        ax, ay = clip[e]
        bx, by = clip[(e + 1) % m]
        out = _clip_once(out, ax, ay, bx, by, dtype)
        if out is None or len(out) < 3:
            return None
    return out


def _decompose(mp: MultiPolygon, dtype) -> list:
    pieces = []
    for part in mp.parts:
        if not part.holes and _ring_is_convex(part.outer.coords):
            pieces.append(part.outer.coords.astype(dtype))
        else:
            pieces.extend(_trapezoids(part, dtype))
    return pieces


def _bounds_of(coords: np.ndarray):
    return (coords[:, 0].min(), coords[:, 1].min(), coords[:, 0].max(), coords[:, 1].max())


def _assemble(pieces) -> MultiPolygon:
    parts = []
    for coords in pieces:
        if coords is None:
            continue
        keep = np.ones(len(coords), dtype=bool)
        keep[1:] = np.any(coords[1:] != coords[:-1], axis=1)
        if np.array_equal(coords[0], coords[-1]):
            keep[-1] = False
        coords = coords[keep]
        if len(coords) < 3 or _piece_area(coords) <= 0.0:
            continue
        parts.append(PolygonPart(Ring(np.asarray(coords, dtype=np.float64))))
    return MultiPolygon(tuple(parts))


def intersect(a: MultiPolygon, b: MultiPolygon, dtype=np.float64) -> MultiPolygon:
    """Boolean intersection; the result may be empty."""
    dtype = np.dtype(dtype).type
    if a.is_empty or b.is_empty:
        return MultiPolygon(())
    ca = _convex_parts(a)
    cb = _convex_parts(b)
    pieces = []
    if cb is not None:
        for s in _decompose(a, dtype):
            for c in cb:
                pieces.append(_clip_convex(s, c.astype(dtype), dtype))
    elif ca is not None:
        for s in _decompose(b, dtype):
            for c in ca:
                pieces.append(_clip_convex(s, c.astype(dtype), dtype))
    else:
        ta = _decompose(a, dtype)
        tb = _decompose(b, dtype)
        boxes_b = np.array([_bounds_of(t) for t in tb]) if tb else np.empty((0, 4))
        for s in ta:
            sb = _bounds_of(s)
            if len(tb) == 0:
                break
            cand = np.nonzero((boxes_b[:, 0] < sb[2]) & (boxes_b[:, 2] > sb[0])
                              & (boxes_b[:, 1] < sb[3]) & (boxes_b[:, 3] > sb[1]))[0]
            for k in cand:
                pieces.append(_clip_convex(s, tb[k], dtype))
    return _assemble(pieces)


def intersection_area(a: MultiPolygon, b: MultiPolygon, dtype=np.float64) -> float:
    res = intersect(a, b, dtype=dtype)
    return float(sum(_piece_area(p.outer.coords) for p in res.parts))
