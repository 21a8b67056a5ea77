"""Distribution statistics, rank correlation, and reduced-precision audit."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import scores
from .errors import InvalidInputError, UndefinedCorrelationError

HISTOGRAM_BINS = 20


@dataclass(frozen=True)
class Distribution:
    values: tuple
    mean: float
    std: float          # population standard deviation
    counts: tuple       # 20 equal bins over [0, 1]; final bin right-closed

    @property
    def bin_edges(self) -> list:
        return [i / HISTOGRAM_BINS for i in range(HISTOGRAM_BINS + 1)]


def distribution(values) -> Distribution:
    vals = np.asarray(list(values), dtype=np.float64)
    if vals.size == 0:
        raise InvalidInputError("cannot summarize an empty value set")
    if not np.all(np.isfinite(vals)) or vals.min() < 0.0 or vals.max() > 1.0:
        raise InvalidInputError("score values must be finite and within [0, 1]")
    idx = np.minimum((vals * HISTOGRAM_BINS).astype(np.int64), HISTOGRAM_BINS - 1)
    counts = np.bincount(idx, minlength=HISTOGRAM_BINS)
    return Distribution(values=tuple(float(v) for v in vals),
                        mean=float(vals.mean()),
                        std=float(vals.std()),
                        counts=tuple(int(c) for c in counts))


def histogram_csv(dist: Distribution, focal: float | None = None) -> str:
    """Histogram export; a trailing ``focal`` row marks the focal district."""
    lines = ["bin_low,bin_high,count"]
    for i, c in enumerate(dist.counts):
        lines.append(f"{i / HISTOGRAM_BINS:.2f},{(i + 1) / HISTOGRAM_BINS:.2f},{c}")
    if focal is not None:
        lines.append(f"focal,{focal:.6f}")
    return "\n".join(lines) + "\n"


def _average_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0  # ties get the average rank
        i = j + 1
    return ranks


def spearman(xs, ys) -> float:
    """Spearman's rank correlation: Pearson correlation of average ranks."""
    x = np.asarray(list(xs), dtype=np.float64)
    y = np.asarray(list(ys), dtype=np.float64)
    if len(x) != len(y):
        raise UndefinedCorrelationError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise UndefinedCorrelationError("need at least 2 pairs")
    rx = _average_ranks(x)
    ry = _average_ranks(y)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    sx = float(np.sqrt(np.sum(dx * dx)))
    sy = float(np.sqrt(np.sum(dy * dy)))
    if sx == 0.0 or sy == 0.0:
        raise UndefinedCorrelationError("rank correlation undefined for a constant sequence")
    return float(np.sum(dx * dy) / (sx * sy))


@dataclass(frozen=True)
class PrecisionRow:
    label: str
    score_name: str
    value64: float
    value32: float
    pct_diff: float | None  # None when the binary64 truth is zero


@dataclass(frozen=True)
class PrecisionReport:
    rows: tuple
    max_pct_diff: float
    excluded: tuple  # (label, score_name) pairs with zero truth value

    def csv(self) -> str:
        lines = ["label,score_name,value64,value32,pct_diff"]
        for r in self.rows:
            pct = "" if r.pct_diff is None else f"{r.pct_diff:.9f}"
            lines.append(f"{r.label},{r.score_name},{r.value64:.9f},{r.value32:.9f},{pct}")
        lines.append(f"_summary,max_pct_diff,,,{self.max_pct_diff:.9f}")
        return "\n".join(lines) + "\n"


def precision_delta(entries, score_names, seed=None) -> PrecisionReport:
    """Run every score in binary32 and binary64 and report the worst
    percent difference, binary64 taken as truth.

    ``entries`` is an iterable of (label, MultiPolygon, superunit-or-None).
    Scores whose requirements a fixture cannot meet (a B score without a
    superunit) are skipped for that fixture.
    """
    if seed is None:
        from .mincircle import DEFAULT_SEED
        seed = DEFAULT_SEED
    rows = []
    excluded = []
    worst = 0.0
    for label, mp, superunit in entries:
        for name in score_names:
            spec = scores.parse_score_name(name)
            if spec.borders and superunit is None:
                continue
            v64 = scores.score_district(mp, spec, superunit, dtype=np.float64, seed=seed).value
            v32 = scores.score_district(mp, spec, superunit, dtype=np.float32, seed=seed).value
            if v64 == 0.0:
                excluded.append((label, spec.name))
                rows.append(PrecisionRow(label, spec.name, v64, v32, None))
                continue
            pct = abs(v32 - v64) / abs(v64) * 100.0
            worst = max(worst, pct)
            rows.append(PrecisionRow(label, spec.name, v64, v32, pct))
    if not rows:
        raise InvalidInputError("no (fixture, score) pairs to compare")
    return PrecisionReport(rows=tuple(rows), max_pct_diff=worst, excluded=tuple(excluded))
