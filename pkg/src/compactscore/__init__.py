"""Compactness scoring for electoral districts, with every implementation
choice explicit: score variant, projection, simplification tolerance, and
sole-district policy — plus an adversarial search over all of them."""

__version__ = "0.1.0"

from .geom import Circle, MultiPolygon, Point, PolygonPart, Ring  # noqa: F401
from .ingest import District, DistrictSet, ScoreRow  # noqa: F401
from .scores import ScoreResult, ScoreSpec, parse_score_name, score_district  # noqa: F401
