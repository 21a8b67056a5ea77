"""GeoJSON ingestion, district metadata, and tabular output.

Districts arrive as an RFC 7946 FeatureCollection of Polygon/MultiPolygon
features in lon/lat degrees; superunits (states) arrive as a second
FeatureCollection. Geometry is normalized on read: outer rings
counterclockwise, holes clockwise, consecutive duplicate points removed.
Conversion from published shapefile datasets to GeoJSON is an external step
(e.g. ``ogr2ogr -f GeoJSON districts.geojson cb_2015_us_cd114_500k.shp``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from .errors import DataError
from .geom import MultiPolygon, PolygonPart, Ring

DEFAULT_CODE_PROPERTIES = ("superunit", "district")

CSV_HEADER = "superunit,district,score_name,projection,tolerance_m,choice_policy,value"


@dataclass(frozen=True)
class District:
    geometry: MultiPolygon
    superunit_code: str
    district_code: str
    sole_district: bool = False

    @property
    def key(self) -> str:
        return f"{self.superunit_code}:{self.district_code}"


@dataclass(frozen=True)
class DistrictSet:
    districts: tuple[District, ...]
    superunits: dict | None = None
    resolution_label: str | None = None

    def find(self, superunit_code: str, district_code: str) -> District:
        for d in self.districts:
            if d.superunit_code == superunit_code and d.district_code == district_code:
                return d
        raise DataError(f"no district {superunit_code}:{district_code} in set")


def _parse_document(document) -> dict:
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as e:
        raise DataError(f"malformed GeoJSON at byte offset {e.pos}: {e.msg}") from e
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise DataError("expected a GeoJSON FeatureCollection")
    return doc


def _geometry_to_multipolygon(geometry: dict, index: int) -> MultiPolygon:
    if not isinstance(geometry, dict):
        raise DataError(f"feature {index}: missing geometry")
    gtype = geometry.get("type")
    if gtype == "Polygon":
        polys = [geometry.get("coordinates", [])]
    elif gtype == "MultiPolygon":
        polys = geometry.get("coordinates", [])
    else:
        raise DataError(f"feature {index}: unsupported geometry type {gtype!r}")
    parts = []
    try:
        for rings in polys:
            if not rings:
                raise DataError(f"feature {index}: polygon with no rings")
            outer = Ring(rings[0])
            holes = tuple(Ring(r) for r in rings[1:])
            parts.append(PolygonPart(outer, holes))
    except DataError:
        raise
    except Exception as e:
        raise DataError(f"feature {index}: invalid geometry: {e}") from e
    if not parts:
        raise DataError(f"feature {index}: empty geometry")
    return MultiPolygon(tuple(parts))


def read_geojson(document, code_properties=DEFAULT_CODE_PROPERTIES) -> DistrictSet:
    """Read a district FeatureCollection; the two named properties identify
    each feature's superunit and district codes."""
    doc = _parse_document(document)
    su_prop, d_prop = code_properties
    districts = []
    seen = set()
    for i, feature in enumerate(doc.get("features", [])):
        props = feature.get("properties") or {}
        if su_prop not in props or d_prop not in props:
            raise DataError(
                f"feature {i}: missing identifier properties {su_prop!r}/{d_prop!r}")
        su = str(props[su_prop])
        dc = str(props[d_prop])
        if (su, dc) in seen:
            raise DataError(f"feature {i}: duplicate district {su}:{dc}")
        seen.add((su, dc))
        mp = _geometry_to_multipolygon(feature.get("geometry"), i)
        districts.append(District(geometry=mp, superunit_code=su, district_code=dc))
    return DistrictSet(districts=tuple(districts),
                       resolution_label=doc.get("resolution"))


def read_superunits(document, code_property: str = "superunit"):
    """Read superunit geometries keyed by code; returns (mapping, resolution label)."""
    doc = _parse_document(document)
    out = {}
    for i, feature in enumerate(doc.get("features", [])):
        props = feature.get("properties") or {}
        if code_property not in props:
            raise DataError(f"feature {i}: missing identifier property {code_property!r}")
        code = str(props[code_property])
        if code in out:
            raise DataError(f"feature {i}: duplicate superunit {code}")
        out[code] = _geometry_to_multipolygon(feature.get("geometry"), i)
    return out, doc.get("resolution")


def flag_sole_districts(dset: DistrictSet) -> DistrictSet:
    """Mark districts whose superunit contains exactly one district."""
    counts: dict[str, int] = {}
    for d in dset.districts:
        counts[d.superunit_code] = counts.get(d.superunit_code, 0) + 1
    flagged = tuple(replace(d, sole_district=(counts[d.superunit_code] == 1))
                    for d in dset.districts)
    return replace(dset, districts=flagged)


def _ring_coords_json(ring: Ring) -> list:
    coords = [[float(x), float(y)] for x, y in ring.coords]
    coords.append(coords[0])
    return coords


def multipolygon_to_geojson_geometry(mp: MultiPolygon) -> dict:
    return {
        "type": "MultiPolygon",
        "coordinates": [[_ring_coords_json(r) for r in part.rings] for part in mp.parts],
    }


def write_geojson(dset: DistrictSet) -> str:
    """Serialize a district set; reading it back reproduces coordinates exactly."""
    features = []
    for d in dset.districts:
        features.append({
            "type": "Feature",
            "properties": {"superunit": d.superunit_code, "district": d.district_code,
                           "sole": d.sole_district},
            "geometry": multipolygon_to_geojson_geometry(d.geometry),
        })
    doc = {"type": "FeatureCollection", "features": features}
    if dset.resolution_label is not None:
        doc["resolution"] = dset.resolution_label
    return json.dumps(doc)


@dataclass(frozen=True)
class ScoreRow:
    superunit: str
    district: str
    score_name: str
    projection: str
    tolerance_m: float
    choice_policy: str
    value: float


def write_csv(rows) -> str:
    """Deterministic score CSV: sorted rows, six decimal places."""
    rows = sorted(rows, key=lambda r: (r.superunit, r.district, r.score_name))
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(f"{r.superunit},{r.district},{r.score_name},{r.projection},"
                     f"{r.tolerance_m:g},{r.choice_policy},{r.value:.6f}")
    return "\n".join(lines) + "\n"


def read_csv(text: str) -> list[ScoreRow]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise DataError("not a score CSV (unexpected header)")
    out = []
    for ln in lines[1:]:
        su, d, name, projection, tol, policy, value = ln.split(",")
        out.append(ScoreRow(su, d, name, projection, float(tol), policy, float(value)))
    return out
