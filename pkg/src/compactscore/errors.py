"""Exception hierarchy shared across the package.

Errors are split along the CLI's exit-code contract: ``UsageError``-like
problems (bad flags, bad score names) versus data problems (bad geometry,
bad documents, impossible configurations).
"""


class CompactScoreError(Exception):
    """Base class for all errors raised by this package."""


class InvalidGeometryError(CompactScoreError):
    """Geometry violates an invariant (degenerate ring, non-finite coordinate)."""


class InvalidInputError(CompactScoreError):
    """An argument is outside an operation's domain (negative tolerance, empty set)."""


class DegenerateHullError(InvalidGeometryError):
    """Convex hull requested for a collinear-only point set."""


class DegenerateGeometryError(InvalidGeometryError):
    """A score denominator degenerated (zero perimeter, empty clipped enclosure)."""


class ResourceLimitError(InvalidInputError):
    """A guard against runaway synthetic geometry (e.g. fractal level too deep)."""


class UnsupportedExtentError(InvalidInputError):
    """A local projection fit was requested for an extent it cannot cover."""


class ProjectionDomainError(CompactScoreError):
    """A point lies at or beyond a projection singularity."""


class UnsupportedQueryError(CompactScoreError):
    """The projection family has no closed form for the requested quantity."""


class ScoreNameError(InvalidInputError):
    """A score name failed to parse; the message names the offending token."""


class ConfigurationError(CompactScoreError):
    """A score/search configuration cannot be applied (e.g. B-score without superunits)."""


class EmptySearchError(ConfigurationError):
    """No configuration in the search space was applicable."""


class UndefinedCorrelationError(InvalidInputError):
    """Rank correlation is undefined (length mismatch or constant sequence)."""


class DataError(CompactScoreError):
    """An input document could not be parsed or fails feature-level validation."""
