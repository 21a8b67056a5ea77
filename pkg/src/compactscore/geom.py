"""Planar geometry kernel: measures, hulls, simplification, synthetic fixtures.

Coordinates are plain x/y pairs: degrees before projection, meters after.
All operations are pure functions over immutable inputs. The measurement
routines accept a ``dtype`` so the whole pipeline can be run genuinely in
IEEE-754 binary32 as well as binary64; geometry is stored in binary64 and
cast on entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    InvalidGeometryError,
    InvalidInputError,
    DegenerateHullError,
    ResourceLimitError,
)


class Point(NamedTuple):
    x: float
    y: float


class Bounds(NamedTuple):
    min_x: float
    min_y: float
    max_x: float
    max_y: float


def _as_coord_array(points: Iterable) -> np.ndarray:
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InvalidGeometryError(f"expected a sequence of (x, y) pairs, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidGeometryError("non-finite coordinate in ring")
    return arr


def _dedupe_consecutive(arr: np.ndarray) -> np.ndarray:
    """Remove consecutive duplicates, including a repeated closing point."""
    if len(arr) > 1 and np.array_equal(arr[0], arr[-1]):
        arr = arr[:-1]
    if len(arr) < 2:
        return arr
    keep = np.ones(len(arr), dtype=bool)
    keep[1:] = np.any(arr[1:] != arr[:-1], axis=1)
    return arr[keep]


def shoelace_area(coords: np.ndarray) -> float:
    """Signed shoelace area of an implicitly closed ring; positive when CCW."""
    x = coords[:, 0]
    y = coords[:, 1]
    return float(0.5 * (x @ np.roll(y, -1) - y @ np.roll(x, -1)))


def ring_length(coords: np.ndarray) -> float:
    d = np.roll(coords, -1, axis=0) - coords
    return float(np.sum(np.hypot(d[:, 0], d[:, 1])))


@dataclass(frozen=True)
class Ring:
    """Ordered boundary, implicitly closed (first point not repeated)."""

    coords: np.ndarray

    def __post_init__(self):
        arr = _dedupe_consecutive(_as_coord_array(self.coords))
        if len(arr) < 3:
            raise InvalidGeometryError(f"ring needs >= 3 distinct points, got {len(arr)}")
        if shoelace_area(arr) == 0.0:
            raise InvalidGeometryError("ring has zero signed area")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    def __len__(self) -> int:
        return len(self.coords)

    @property
    def signed_area(self) -> float:
        return shoelace_area(self.coords)

    @property
    def length(self) -> float:
        return ring_length(self.coords)

    def reversed(self) -> "Ring":
        return Ring(self.coords[::-1])

    def points(self) -> list[Point]:
        return [Point(float(x), float(y)) for x, y in self.coords]


@dataclass(frozen=True)
class PolygonPart:
    """One outer ring plus its holes; orientation is normalized on construction."""

    outer: Ring
    holes: tuple[Ring, ...] = ()

    def __post_init__(self):
        outer = self.outer if self.outer.signed_area > 0 else self.outer.reversed()
        holes = tuple(h if h.signed_area < 0 else h.reversed() for h in self.holes)
        ob = ring_bounds(outer)
        for h in holes:
            hb = ring_bounds(h)
            if (hb.min_x < ob.min_x or hb.min_y < ob.min_y
                    or hb.max_x > ob.max_x or hb.max_y > ob.max_y):
                raise InvalidGeometryError("hole extends outside its outer ring")
        object.__setattr__(self, "outer", outer)
        object.__setattr__(self, "holes", holes)

    @property
    def rings(self) -> tuple[Ring, ...]:
        return (self.outer,) + self.holes


@dataclass(frozen=True)
class MultiPolygon:
    """A district's geometry: parts with pairwise disjoint interiors.

    An empty MultiPolygon (no parts) is the representation of an empty
    boolean-operation result; district ingestion rejects empty geometry.
    """

    parts: tuple[PolygonPart, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    @property
    def is_empty(self) -> bool:
        return len(self.parts) == 0

    @classmethod
    def from_part(cls, outer, holes=()) -> "MultiPolygon":
        return cls((PolygonPart(Ring(outer), tuple(Ring(h) for h in holes)),))


@dataclass(frozen=True)
class Circle:
    center: Point
    radius: float

    def __post_init__(self):
        if not (self.radius >= 0.0 and math.isfinite(self.radius)):
            raise InvalidGeometryError(f"invalid circle radius {self.radius}")


def ring_bounds(ring: Ring) -> Bounds:
    c = ring.coords
    return Bounds(float(c[:, 0].min()), float(c[:, 1].min()),
                  float(c[:, 0].max()), float(c[:, 1].max()))


def bounds(mp: MultiPolygon) -> Bounds:
    if mp.is_empty:
        raise InvalidInputError("empty MultiPolygon has no bounds")
    bb = [ring_bounds(p.outer) for p in mp.parts]
    return Bounds(min(b.min_x for b in bb), min(b.min_y for b in bb),
                  max(b.max_x for b in bb), max(b.max_y for b in bb))


def outer_points(mp: MultiPolygon) -> np.ndarray:
    """All outer-ring vertices of every part, stacked. Hole vertices excluded."""
    return np.vstack([p.outer.coords for p in mp.parts])


def map_coords(mp: MultiPolygon, fn) -> MultiPolygon:
    """Rebuild a MultiPolygon with ``fn`` applied to each ring's (n, 2) array."""
    parts = []
    for part in mp.parts:
        outer = Ring(fn(part.outer.coords))
        holes = tuple(Ring(fn(h.coords)) for h in part.holes)
        parts.append(PolygonPart(outer, holes))
    return MultiPolygon(tuple(parts))


# --- measurement -----------------------------------------------------------

def ring_area(ring: Ring) -> float:
    """Signed shoelace area: positive for counterclockwise rings."""
    return ring.signed_area


def _area_and_length(coords: np.ndarray, dtype) -> tuple:
    c = coords.astype(dtype, copy=False)
    c = c - c.mean(axis=0)  # recenter to tame cancellation on large offsets
    x, y = c[:, 0], c[:, 1]
    area = dtype(0.5) * (x @ np.roll(y, -1) - y @ np.roll(x, -1))
    d = np.roll(c, -1, axis=0) - c
    length = np.sum(np.hypot(d[:, 0], d[:, 1]), dtype=dtype)
    return abs(area), length


def measure_part(part: PolygonPart, area_holes: str = "SH", perim_holes: str = "exclude",
                 dtype=np.float64):
    """(area, perimeter) of one part under the given hole semantics.

    Results are scalars of ``dtype`` so binary32 pipelines stay in binary32.
    """
    if area_holes not in ("AH", "SH"):
        raise InvalidInputError(f"area_holes must be AH or SH, got {area_holes!r}")
    if perim_holes not in ("include", "exclude"):
        raise InvalidInputError(f"perim_holes must be include or exclude, got {perim_holes!r}")
    dtype = np.dtype(dtype).type
    area, perim = _area_and_length(part.outer.coords, dtype)
    for h in part.holes:
        ha, hp = _area_and_length(h.coords, dtype)
        if area_holes == "SH":
            area = area - ha
        if perim_holes == "include":
            perim = perim + hp
    return area, perim


def measure(mp: MultiPolygon, area_holes: str = "SH", perim_holes: str = "exclude",
            dtype=np.float64):
    """Total (area, perimeter) over all parts under the given hole semantics."""
    dtype = np.dtype(dtype).type
    area = dtype(0.0)
    perim = dtype(0.0)
    for part in mp.parts:
        a, p = measure_part(part, area_holes, perim_holes, dtype)
        area = area + a
        perim = perim + p
    return area, perim


# --- convex hull ------------------------------------------------------------

def _octagon_prefilter(pts: np.ndarray) -> np.ndarray:
    """Discard points strictly inside the octagon of the 8 directional
    extremes; survivors are a superset of the hull vertices."""
    dirs = np.array([[1, 0], [1, 1], [0, 1], [-1, 1], [-1, 0], [-1, -1], [0, -1], [1, -1]],
                    dtype=np.float64)
    proj = pts @ dirs.T
    corners = pts[np.argmax(proj, axis=0)]
    keep = np.zeros(len(pts), dtype=bool)
    for i in range(8):
        a = corners[i]
        b = corners[(i + 1) % 8]
        keep |= (b[0] - a[0]) * (pts[:, 1] - a[1]) - (b[1] - a[1]) * (pts[:, 0] - a[0]) <= 0.0
    return pts[keep]


def hull_of_points(pts: np.ndarray) -> np.ndarray:
    """Andrew monotone chain; returns hull vertices counterclockwise."""
    pts = np.asarray(pts)
    if len(pts) == 0:
        raise InvalidInputError("empty point set has no hull")
    if len(pts) > 1024:
        filtered = _octagon_prefilter(pts)
        if len(filtered) >= 3:
            pts = filtered
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    p = [tuple(map(float, pts[i])) for i in order]
    dedup = [p[0]]
    for q in p[1:]:
        if q != dedup[-1]:
            dedup.append(q)
    p = dedup
    if len(p) < 3:
        raise DegenerateHullError("hull of fewer than 3 distinct points is degenerate")

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for q in p:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], q) <= 0:
            lower.pop()
        lower.append(q)
    upper: list = []
    for q in reversed(p):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], q) <= 0:
            upper.pop()
        upper.append(q)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateHullError("all points are collinear")
    return np.asarray(hull, dtype=np.float64)


def convex_hull(mp: MultiPolygon, parts: str = "PT"):
    """Convex hull ring of all outer-ring points (PT) or one per part (PS)."""
    if parts == "PT":
        return Ring(hull_of_points(outer_points(mp)))
    if parts == "PS":
        return tuple(Ring(hull_of_points(p.outer.coords)) for p in mp.parts)
    raise InvalidInputError(f"parts must be PT or PS, got {parts!r}")


# --- simplification ---------------------------------------------------------

def _dp_mask(coords: np.ndarray, tolerance: float) -> np.ndarray:
    """Douglas-Peucker keep-mask for an open polyline (endpoints always kept)."""
    n = len(coords)
    keep = np.zeros(n, dtype=bool)
    keep[0] = keep[-1] = True
    stack = [(0, n - 1)]
    x = coords[:, 0]
    y = coords[:, 1]
    while stack:
        i, j = stack.pop()
        if j <= i + 1:
            continue
        x0, y0 = x[i], y[i]
        dx = x[j] - x0
        dy = y[j] - y0
        seg = math.hypot(dx, dy)
        xs = x[i + 1:j]
        ys = y[i + 1:j]
        if seg == 0.0:
            dist = np.hypot(xs - x0, ys - y0)
        else:
            dist = np.abs(dx * (ys - y0) - dy * (xs - x0)) / seg
        k = int(np.argmax(dist))
        if dist[k] > tolerance:
            m = i + 1 + k
            keep[m] = True
            stack.append((i, m))
            stack.append((m, j))
    return keep


def _three_extreme_vertices(coords: np.ndarray) -> np.ndarray:
    """Fallback for rings that would collapse: two most x-separated vertices
    plus the vertex farthest from their chord."""
    i = int(np.argmin(coords[:, 0]))
    j = int(np.argmax(coords[:, 0]))
    a, b = coords[i], coords[j]
    d = b - a
    off = np.abs(d[0] * (coords[:, 1] - a[1]) - d[1] * (coords[:, 0] - a[0]))
    k = int(np.argmax(off))
    idx = sorted({i, j, k})
    if len(idx) < 3 or off[k] == 0.0:
        raise InvalidGeometryError("ring cannot be reduced to a non-degenerate triangle")
    return coords[idx]


def simplify_ring(ring: Ring, tolerance: float) -> Ring:
    coords = ring.coords
    # Close the ring by splitting at the two most x-separated vertices so
    # both endpoints of each open chain are anchored.
    i = int(np.argmin(coords[:, 0]))
    j = int(np.argmax(coords[:, 0]))
    if i == j:
        raise InvalidGeometryError("degenerate ring")
    lo, hi = (i, j) if i < j else (j, i)
    chain1 = coords[lo:hi + 1]
    chain2 = np.vstack([coords[hi:], coords[:lo + 1]])
    keep1 = _dp_mask(chain1, tolerance)
    keep2 = _dp_mask(chain2, tolerance)
    merged = np.vstack([chain1[keep1][:-1], chain2[keep2][:-1]])
    merged = _dedupe_consecutive(merged)
    if len(merged) < 3 or shoelace_area(merged) == 0.0:
        merged = _three_extreme_vertices(coords)
    return Ring(merged)


def simplify(mp: MultiPolygon, tolerance: float) -> MultiPolygon:
    """Douglas-Peucker per ring. Tolerance 0 is the identity; collapsing rings
    are retained at 3 extreme vertices instead of being dropped."""
    if tolerance < 0:
        raise InvalidInputError(f"tolerance must be >= 0, got {tolerance}")
    if tolerance == 0:
        return mp
    parts = []
    for part in mp.parts:
        outer = simplify_ring(part.outer, tolerance)
        holes = tuple(simplify_ring(h, tolerance) for h in part.holes)
        parts.append(PolygonPart(outer, holes))
    return MultiPolygon(tuple(parts))


# --- synthetic shapes -------------------------------------------------------

def circle_to_ring(circle: Circle, n: int = 256) -> Ring:
    """Regular n-gon inscribed in the circle; enables clipping a circle
    against polygon boundaries."""
    if n < 8:
        raise InvalidInputError(f"need at least 8 vertices to polygonize a circle, got {n}")
    if circle.radius <= 0.0:
        raise InvalidGeometryError("cannot polygonize a zero-radius circle")
    theta = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    coords = np.column_stack([
        circle.center.x + circle.radius * np.cos(theta),
        circle.center.y + circle.radius * np.sin(theta),
    ])
    return Ring(coords)


KOCH_MAX_LEVEL = 10


def koch_snowflake(level: int) -> MultiPolygon:
    """Koch snowflake with unit side at level 0; vertex count is 3 * 4**level."""
    if level < 0:
        raise InvalidInputError("level must be >= 0")
    if level > KOCH_MAX_LEVEL:
        raise ResourceLimitError(f"koch level {level} exceeds limit {KOCH_MAX_LEVEL}")
    r = 1.0 / math.sqrt(3.0)  # circumradius for side 1
    angles = np.array([math.pi / 2, math.pi / 2 + 2 * math.pi / 3, math.pi / 2 + 4 * math.pi / 3])
    pts = np.column_stack([r * np.cos(angles), r * np.sin(angles)])
    # counterclockwise triangle; bumps go outward (to the right of travel)
    cos60, sin60 = 0.5, math.sqrt(3.0) / 2.0
    for _ in range(level):
        p = pts
        q = np.roll(pts, -1, axis=0)
        a = p + (q - p) / 3.0
        b = p + 2.0 * (q - p) / 3.0
        d = b - a
        m = np.column_stack([
            a[:, 0] + cos60 * d[:, 0] + sin60 * d[:, 1],
            a[:, 1] - sin60 * d[:, 0] + cos60 * d[:, 1],
        ])
        pts = np.stack([p, a, m, b], axis=1).reshape(-1, 2)
    return MultiPolygon.from_part(pts)
