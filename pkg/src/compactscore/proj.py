"""Forward map projections from lon/lat degrees to planar meters.

Spherical forms throughout (authalic radius), which is accurate far beyond
the score differences this package is built to expose. Supported families:
cylindrical (Mercator, Web Mercator, Gall stereographic), pseudocylindrical
(Robinson by its published coefficient table, Mollweide), and conic (Lambert
conformal, Albers equal-area, equidistant), the conics either locally fitted
or with the conventional conterminous-US parameter sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    InvalidInputError,
    ProjectionDomainError,
    UnsupportedExtentError,
    UnsupportedQueryError,
)
from .geom import Bounds, MultiPolygon, map_coords

SPHERE_RADIUS = 6371007.2       # authalic sphere radius, meters
WEB_MERCATOR_RADIUS = 6378137.0  # the web convention's sphere

FAMILIES = ("mercator", "webmercator", "gall", "robinson", "mollweide",
            "lcc", "aea", "eqdc")

#: Canonical projection names accepted across the CLI and service.
CANONICAL_PROJECTIONS = ("mercator", "webmercator", "gall", "robinson", "mollweide",
                         "lcc-local", "aea-local", "aea-conus", "lcc-conus", "eqdc-conus")

MERCATOR_LAT_LIMIT = 89.5


@dataclass(frozen=True)
class ProjectionSpec:
    family: str
    lon0: float = 0.0
    lat0: float = 0.0
    lat1: float | None = None
    lat2: float | None = None
    radius: float = SPHERE_RADIUS

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidInputError(f"unknown projection family {self.family!r}")
        if not -180.0 <= self.lon0 <= 180.0:
            raise InvalidInputError(f"central meridian {self.lon0} outside [-180, 180]")
        if self.family in ("lcc", "aea", "eqdc"):
            if self.lat1 is None or self.lat2 is None:
                raise InvalidInputError(f"{self.family} requires two standard parallels")
            if self.family == "lcc" and self.lat1 == -self.lat2:
                raise InvalidInputError("lcc standard parallels must not be opposite")
            if self._cone_constant() == 0.0:
                raise InvalidInputError("degenerate cone constant")

    def _cone_constant(self) -> float:
        p1 = math.radians(self.lat1)
        p2 = math.radians(self.lat2)
        if self.family == "lcc":
            if self.lat1 == self.lat2:
                return math.sin(p1)
            return (math.log(math.cos(p1) / math.cos(p2))
                    / math.log(math.tan(math.pi / 4 + p2 / 2) / math.tan(math.pi / 4 + p1 / 2)))
        if self.family == "aea":
            return (math.sin(p1) + math.sin(p2)) / 2.0
        if self.family == "eqdc":
            if self.lat1 == self.lat2:
                return math.sin(p1)
            return (math.cos(p1) - math.cos(p2)) / (p2 - p1)
        raise UnsupportedQueryError(f"{self.family} has no cone constant")


# Conventional conterminous-US parameter sets, re-expressed on the sphere.
CONUS_AEA = ProjectionSpec("aea", lon0=-96.0, lat0=37.5, lat1=29.5, lat2=45.5)
CONUS_LCC = ProjectionSpec("lcc", lon0=-96.0, lat0=39.0, lat1=33.0, lat2=45.0)
CONUS_EQDC = ProjectionSpec("eqdc", lon0=-96.0, lat0=39.0, lat1=33.0, lat2=45.0)

# Robinson's coefficient table: per 5 degrees of latitude, parallel length
# scale X and distance-from-equator scale Y.
_ROBINSON_LAT = np.arange(0.0, 95.0, 5.0)
_ROBINSON_X = np.array([
    1.0000, 0.9986, 0.9954, 0.9900, 0.9822, 0.9730, 0.9600, 0.9427, 0.9216,
    0.8962, 0.8679, 0.8350, 0.7986, 0.7597, 0.7186, 0.6732, 0.6213, 0.5722,
    0.5322,
])
_ROBINSON_Y = np.array([
    0.0000, 0.0620, 0.1240, 0.1860, 0.2480, 0.3100, 0.3720, 0.4340, 0.4958,
    0.5571, 0.6176, 0.6769, 0.7346, 0.7903, 0.8435, 0.8936, 0.9394, 0.9761,
    1.0000,
])


def fit_local(extent: Bounds, family: str) -> ProjectionSpec:
    """Locally fitted conic spec for a lon/lat extent, standard parallels by
    the one-sixth rule."""
    family = family.lower()
    if family not in ("lcc", "aea"):
        raise InvalidInputError(f"local fit supports lcc or aea, got {family!r}")
    lon_min, lat_min, lon_max, lat_max = extent
    if lon_min > lon_max or lat_min > lat_max:
        raise InvalidInputError("empty extent")
    if lat_max > 89.0 or lat_min < -89.0:
        raise UnsupportedExtentError("extent reaches a pole")
    span = lat_max - lat_min
    if span >= 60.0:
        raise UnsupportedExtentError(f"latitude span {span} too wide for a local fit")
    lat1 = lat_min + span / 6.0
    lat2 = lat_max - span / 6.0
    lat0 = (lat_min + lat_max) / 2.0
    lon0 = (lon_min + lon_max) / 2.0
    if lat1 == -lat2 and family == "lcc":
        lat1 += 1e-6  # symmetric extents degenerate the cone; nudge off the equator
        lat2 += 1e-6
    return ProjectionSpec(family, lon0=lon0, lat0=lat0, lat1=lat1, lat2=lat2)


def _check_lonlat(lon: np.ndarray, lat: np.ndarray):
    bad = ~(np.isfinite(lon) & np.isfinite(lat)
            & (np.abs(lon) <= 180.0) & (np.abs(lat) <= 90.0))
    if np.any(bad):
        i = int(np.argmax(bad))
        raise ProjectionDomainError(f"invalid lon/lat ({lon[i]}, {lat[i]})")


def _mollweide_theta(lat_rad: np.ndarray) -> np.ndarray:
    target = math.pi * np.sin(lat_rad)
    theta = np.array(lat_rad, dtype=np.float64, copy=True)
    for _ in range(30):
        f = 2.0 * theta + np.sin(2.0 * theta) - target
        fp = 2.0 + 2.0 * np.cos(2.0 * theta)
        step = np.where(np.abs(fp) > 1e-12, f / np.where(fp == 0.0, 1.0, fp), 0.0)
        theta = theta - step
        if np.max(np.abs(step)) < 1e-14:
            break
    return theta


def forward(spec: ProjectionSpec, lon: np.ndarray, lat: np.ndarray):
    """Forward-project arrays of degrees to planar meters."""
    lon = np.asarray(lon, dtype=np.float64)
    lat = np.asarray(lat, dtype=np.float64)
    _check_lonlat(lon, lat)
    R = spec.radius if spec.family != "webmercator" else WEB_MERCATOR_RADIUS
    dlam = np.radians(lon - spec.lon0)
    dlam = np.where(dlam > math.pi, dlam - 2 * math.pi, dlam)
    dlam = np.where(dlam < -math.pi, dlam + 2 * math.pi, dlam)
    phi = np.radians(lat)

    if spec.family in ("mercator", "webmercator"):
        if np.any(np.abs(lat) >= MERCATOR_LAT_LIMIT):
            i = int(np.argmax(np.abs(lat) >= MERCATOR_LAT_LIMIT))
            raise ProjectionDomainError(
                f"latitude {lat.ravel()[i] if lat.ndim else float(lat)} at or beyond the "
                f"{MERCATOR_LAT_LIMIT} deg Mercator limit")
        x = R * dlam
        y = R * np.arctanh(np.sin(phi))  # == ln tan(pi/4 + phi/2), exact at the equator
        return x, y

    if spec.family == "gall":
        x = R * dlam / math.sqrt(2.0)
        y = R * (1.0 + math.sqrt(2.0) / 2.0) * np.tan(phi / 2)
        return x, y

    if spec.family == "robinson":
        alat = np.abs(lat)
        X = np.interp(alat, _ROBINSON_LAT, _ROBINSON_X)
        Y = np.interp(alat, _ROBINSON_LAT, _ROBINSON_Y)
        x = 0.8487 * R * X * dlam
        y = 1.3523 * R * Y * np.sign(lat)
        return x, y

    if spec.family == "mollweide":
        theta = _mollweide_theta(phi)
        x = (2.0 * math.sqrt(2.0) / math.pi) * R * dlam * np.cos(theta)
        y = math.sqrt(2.0) * R * np.sin(theta)
        return x, y

    n = spec._cone_constant()
    p0 = math.radians(spec.lat0)
    p1 = math.radians(spec.lat1)

    if spec.family == "lcc":
        F = math.cos(p1) * math.tan(math.pi / 4 + p1 / 2) ** n / n
        rho = R * F / np.tan(math.pi / 4 + phi / 2) ** n
        rho0 = R * F / math.tan(math.pi / 4 + p0 / 2) ** n
    elif spec.family == "aea":
        C = math.cos(p1) ** 2 + 2.0 * n * math.sin(p1)
        rho = R * np.sqrt(C - 2.0 * n * np.sin(phi)) / n
        rho0 = R * math.sqrt(C - 2.0 * n * math.sin(p0)) / n
    else:  # eqdc
        G = math.cos(p1) / n + p1
        rho = R * (G - phi)
        rho0 = R * (G - p0)

    theta = n * dlam
    x = rho * np.sin(theta)
    y = rho0 - rho * np.cos(theta)
    return x, y


def project_point(spec: ProjectionSpec, lon: float, lat: float):
    x, y = forward(spec, np.array([lon]), np.array([lat]))
    return float(x[0]), float(y[0])


def project(spec: ProjectionSpec, mp: MultiPolygon) -> MultiPolygon:
    """Project a degrees MultiPolygon into planar meters, preserving structure."""

    def fn(coords: np.ndarray) -> np.ndarray:
        x, y = forward(spec, coords[:, 0], coords[:, 1])
        return np.column_stack([x, y])

    return map_coords(mp, fn)


def scale_distortion(spec: ProjectionSpec, lon: float, lat: float) -> float:
    """Along-parallel scale factor; exactly 1 on a standard parallel."""
    phi = math.radians(lat)
    cphi = math.cos(phi)
    if cphi <= 0.0:
        raise ProjectionDomainError(f"scale factor undefined at latitude {lat}")
    if spec.family in ("mercator", "webmercator"):
        return 1.0 / cphi
    if spec.family == "gall":
        return (1.0 / math.sqrt(2.0)) / cphi
    if spec.family == "mollweide":
        theta = float(_mollweide_theta(np.array([phi]))[0])
        return (2.0 * math.sqrt(2.0) / math.pi) * math.cos(theta) / cphi
    if spec.family == "robinson":
        raise UnsupportedQueryError("robinson has no closed-form scale factor")
    n = spec._cone_constant()
    R = spec.radius
    p1 = math.radians(spec.lat1)
    if spec.family == "lcc":
        F = math.cos(p1) * math.tan(math.pi / 4 + p1 / 2) ** n / n
        rho = R * F / math.tan(math.pi / 4 + phi / 2) ** n
        return rho * n / (R * cphi)
    if spec.family == "aea":
        C = math.cos(p1) ** 2 + 2.0 * n * math.sin(p1)
        rho = R * math.sqrt(C - 2.0 * n * math.sin(phi)) / n
        return rho * n / (R * cphi)
    G = math.cos(p1) / n + p1
    return (G - phi) * n / cphi


def resolve_projection(name: str, extent: Bounds | None = None) -> ProjectionSpec:
    """Map a canonical projection name to a spec; local fits need an extent."""
    key = name.strip().lower()
    if key == "mercator":
        return ProjectionSpec("mercator")
    if key == "webmercator":
        return ProjectionSpec("webmercator")
    if key == "gall":
        return ProjectionSpec("gall")
    if key == "robinson":
        return ProjectionSpec("robinson")
    if key == "mollweide":
        return ProjectionSpec("mollweide")
    if key == "aea-conus":
        return CONUS_AEA
    if key == "lcc-conus":
        return CONUS_LCC
    if key == "eqdc-conus":
        return CONUS_EQDC
    if key in ("lcc-local", "aea-local"):
        if extent is None:
            raise InvalidInputError(f"{name} requires an extent to fit")
        return fit_local(extent, key.split("-")[0])
    raise InvalidInputError(f"unknown projection {name!r}; choices: "
                            + ", ".join(CANONICAL_PROJECTIONS))
