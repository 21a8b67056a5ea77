"""Compactness score engine.

Four base scores (Polsby-Popper, Schwartzberg, Reock, convex hull) crossed
with the variant suffixes: PT/PS for non-contiguous districts, AH/SH for hole
area, include/exclude for hole perimeter, and B for clipping the enclosing
shape (hull or minimum bounding circle) to the political superunit before
taking its area. All values land in [0, 1]; higher is more compact.

Score-name grammar: ``<Base><PT|PS>[<AH|SH>][B]`` with bases Polsby,
Schwartzberg, Reock, CvxHull, plus the printed aliases PolsbyPopp /
PolsbyPTAH and Schwartzbe (both PT with holes added back). Parsing is
case-insensitive; B is only legal for PT Reock and CvxHull.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import clip, geom, mincircle
from .errors import (
    ConfigurationError,
    DegenerateGeometryError,
    ScoreNameError,
)
from .geom import MultiPolygon

CANONICAL_SCORES = ("PolsbyPopp", "Schwartzbe", "ReockPT", "ReockPS", "ReockPTB",
                    "CvxHullPT", "CvxHullPS", "CvxHullPTB")

CIRCLE_RING_VERTICES = 256

_BASES = {
    "polsby": "PolsbyPopper",
    "polsbypopper": "PolsbyPopper",
    "schwartzberg": "Schwartzberg",
    "schwartz": "Schwartzberg",
    "reock": "Reock",
    "cvxhull": "ConvexHull",
    "convexhull": "ConvexHull",
}

_BASE_TOKEN = {"PolsbyPopper": "Polsby", "Schwartzberg": "Schwartzberg",
               "Reock": "Reock", "ConvexHull": "CvxHull"}

# Printed aliases with fixed semantics: polygons together, holes added back.
_ALIASES = {
    "polsbypopp": ("PolsbyPopper", "PT", "AH"),
    "polsbyptah": ("PolsbyPopper", "PT", "AH"),
    "schwartzbe": ("Schwartzberg", "PT", "AH"),
}


@dataclass(frozen=True)
class ScoreSpec:
    base: str
    parts: str = "PT"
    area_holes: str = "SH"
    perim_holes: str = "exclude"
    borders: bool = False

    def __post_init__(self):
        if self.base not in _BASE_TOKEN:
            raise ScoreNameError(f"unknown base score {self.base!r}")
        if self.parts not in ("PT", "PS"):
            raise ScoreNameError(f"parts must be PT or PS, got {self.parts!r}")
        if self.area_holes not in ("AH", "SH"):
            raise ScoreNameError(f"area_holes must be AH or SH, got {self.area_holes!r}")
        if self.perim_holes not in ("include", "exclude"):
            raise ScoreNameError("perim_holes must be include or exclude")
        if self.borders:
            if self.base in ("PolsbyPopper", "Schwartzberg"):
                raise ScoreNameError(
                    f"suffix B: {self.base} has no enclosing shape to clip against borders")
            if self.parts != "PT":
                raise ScoreNameError("suffix B: border-constrained scores are PT only")

    @property
    def name(self) -> str:
        """Canonical printed name; round-trips through parse_score_name."""
        if self.base == "PolsbyPopper" and (self.parts, self.area_holes, self.borders) == ("PT", "AH", False):
            return "PolsbyPopp"
        if self.base == "Schwartzberg" and (self.parts, self.area_holes, self.borders) == ("PT", "AH", False):
            return "Schwartzbe"
        out = _BASE_TOKEN[self.base] + self.parts
        if self.area_holes != "SH":
            out += self.area_holes
        if self.borders:
            out += "B"
        return out


def parse_score_name(name: str) -> ScoreSpec:
    """Parse a score name, including the paper-style printed aliases."""
    token = name.strip()
    low = token.lower()
    if low in _ALIASES:
        base, parts, holes = _ALIASES[low]
        return ScoreSpec(base, parts, holes)
    base = None
    rest = ""
    for key in sorted(_BASES, key=len, reverse=True):
        if low.startswith(key):
            base = _BASES[key]
            rest = low[len(key):]
            break
    if base is None:
        raise ScoreNameError(f"unknown score name {token!r}")
    parts = "PT"
    area_holes = "SH"
    borders = False
    if rest.startswith(("pt", "ps")):
        parts = rest[:2].upper()
        rest = rest[2:]
    if rest.startswith(("ah", "sh")):
        area_holes = rest[:2].upper()
        rest = rest[2:]
    if rest == "b":
        borders = True
        rest = ""
    if rest:
        raise ScoreNameError(f"unrecognized suffix {rest.upper()!r} in score name {token!r}")
    return ScoreSpec(base, parts, area_holes, "exclude", borders)


@dataclass(frozen=True)
class ScoreResult:
    value: float
    spec: ScoreSpec
    digest: dict = field(default_factory=dict)


def _hull_area(points: np.ndarray, dtype) -> float:
    hull = geom.hull_of_points(points).astype(dtype)
    return abs(geom.shoelace_area(hull))


def _clipped_area(enclosure: MultiPolygon, superunit: MultiPolygon, dtype) -> float:
    area = clip.intersection_area(enclosure, superunit, dtype=dtype)
    if area <= 0.0:
        raise DegenerateGeometryError("enclosing shape does not meet the superunit")
    return area


def _finish(raw, spec: ScoreSpec, digest: dict) -> ScoreResult:
    digest = {k: (v if isinstance(v, (list, str)) else float(v)) for k, v in digest.items()}
    digest["raw_value"] = float(raw)
    return ScoreResult(value=float(min(max(raw, 0.0), 1.0)), spec=spec, digest=digest)


def score_district(mp: MultiPolygon, spec: ScoreSpec,
                   superunit: MultiPolygon | None = None,
                   dtype=np.float64, seed: int = mincircle.DEFAULT_SEED) -> ScoreResult:
    """Compute one score for one district (projected, planar meters)."""
    dtype = np.dtype(dtype).type
    if spec.borders and superunit is None:
        raise ConfigurationError(f"{spec.name} needs a superunit geometry")
    if mp.is_empty:
        raise DegenerateGeometryError("empty geometry cannot be scored")

    if spec.base in ("PolsbyPopper", "Schwartzberg"):
        return _isoperimetric(mp, spec, dtype)
    if spec.base == "Reock":
        return _reock(mp, spec, superunit, dtype, seed)
    return _convex_hull_score(mp, spec, superunit, dtype)


def _isoperimetric(mp, spec, dtype) -> ScoreResult:
    per_part = [geom.measure_part(p, spec.area_holes, spec.perim_holes, dtype)
                for p in mp.parts]
    area = dtype(0.0)
    denom = dtype(0.0)
    total_perim = dtype(0.0)
    for a, p in per_part:
        area = area + a
        total_perim = total_perim + p
        if spec.parts == "PS":
            # literal reading of the split form: per-part perimeters squared, summed
            denom = denom + p * p
    if spec.parts == "PT":
        denom = total_perim * total_perim
    if denom == 0.0:
        raise DegenerateGeometryError("zero perimeter")
    pp = dtype(4.0 * math.pi) * area / denom
    digest = {"area": area, "perimeter": total_perim}
    if spec.base == "Schwartzberg":
        return _finish(np.sqrt(pp), spec, digest)
    return _finish(pp, spec, digest)


def _reock(mp, spec, superunit, dtype, seed) -> ScoreResult:
    pi = dtype(math.pi)
    if spec.parts == "PS":
        area = dtype(0.0)
        denom = dtype(0.0)
        radii = []
        for part in mp.parts:
            a, _ = geom.measure_part(part, spec.area_holes, spec.perim_holes, dtype)
            c = mincircle.min_circle_of_points(part.outer.coords, seed=seed, dtype=dtype)
            r = dtype(c.radius)
            area = area + a
            denom = denom + pi * r * r
            radii.append(float(c.radius))
        if denom == 0.0:
            raise DegenerateGeometryError("degenerate bounding circles")
        return _finish(area / denom, spec, {"area": area, "circle_radii": radii})

    area, _ = geom.measure(mp, spec.area_holes, spec.perim_holes, dtype)
    circle = mincircle.min_enclosing_circle(mp, "PT", seed=seed, dtype=dtype)
    if circle.radius == 0.0:
        raise DegenerateGeometryError("degenerate bounding circle")
    r = dtype(circle.radius)
    digest = {"area": area, "circle_radius": circle.radius}
    if spec.borders:
        ring = geom.circle_to_ring(circle, CIRCLE_RING_VERTICES)
        denom = dtype(_clipped_area(MultiPolygon.from_part(ring.coords), superunit, dtype))
        digest["clipped_area"] = denom
    else:
        denom = pi * r * r
    return _finish(area / denom, spec, digest)


def _convex_hull_score(mp, spec, superunit, dtype) -> ScoreResult:
    if spec.parts == "PS":
        area = dtype(0.0)
        denom = dtype(0.0)
        for part in mp.parts:
            a, _ = geom.measure_part(part, spec.area_holes, spec.perim_holes, dtype)
            area = area + a
            denom = denom + dtype(_hull_area(part.outer.coords, dtype))
        if denom == 0.0:
            raise DegenerateGeometryError("degenerate hulls")
        return _finish(area / denom, spec, {"area": area, "hull_area": denom})

    area, _ = geom.measure(mp, spec.area_holes, spec.perim_holes, dtype)
    hull = geom.hull_of_points(geom.outer_points(mp))
    hull_area = abs(geom.shoelace_area(hull.astype(dtype)))
    digest = {"area": area, "hull_area": hull_area}
    if spec.borders:
        denom = dtype(_clipped_area(MultiPolygon.from_part(hull), superunit, dtype))
        digest["clipped_area"] = denom
    else:
        denom = dtype(hull_area)
        if denom == 0.0:
            raise DegenerateGeometryError("degenerate hull")
    return _finish(area / denom, spec, digest)
