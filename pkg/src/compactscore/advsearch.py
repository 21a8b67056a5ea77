"""Adversarial grid search over implementation space.

Enumerates every combination of score name, projection, simplification
tolerance, and sole-district policy, scoring the whole district set under
each, and reports the configuration pair that makes a focal district look
most gerrymandered (largest gap below the mean) and most reasonable
(smallest gap). Deterministic: ties break in lexicographic config order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import analysis, ingest, pipeline, proj, scores
from .errors import ConfigurationError, EmptySearchError, InvalidInputError
from .ingest import DistrictSet
from .mincircle import DEFAULT_SEED

DEFAULT_TOLERANCES = (0.0, 50.0, 100.0, 500.0, 1000.0, 5000.0)


@dataclass(frozen=True)
class ScoreConfig:
    score_name: str
    projection: str
    tolerance_m: float
    choice_policy: str

    @property
    def sort_key(self):
        return (self.score_name, self.projection, self.tolerance_m, self.choice_policy)


@dataclass(frozen=True)
class SearchSpace:
    score_names: tuple = scores.CANONICAL_SCORES
    projections: tuple = proj.CANONICAL_PROJECTIONS
    tolerances: tuple = DEFAULT_TOLERANCES
    choice_policies: tuple = ("choice", "nochoice")

    def __post_init__(self):
        for fieldname in ("score_names", "projections", "tolerances", "choice_policies"):
            if not getattr(self, fieldname):
                raise InvalidInputError(f"search space has empty {fieldname}")
        object.__setattr__(self, "score_names", tuple(self.score_names))
        object.__setattr__(self, "projections", tuple(self.projections))
        object.__setattr__(self, "tolerances", tuple(float(t) for t in self.tolerances))
        object.__setattr__(self, "choice_policies", tuple(self.choice_policies))
        for p in self.choice_policies:
            if p not in pipeline.CHOICE_POLICIES:
                raise InvalidInputError(f"unknown choice policy {p!r}")

    def configs(self) -> list:
        """All configurations in deterministic lexicographic order."""
        out = [ScoreConfig(s, p, t, c)
               for s in self.score_names for p in self.projections
               for t in self.tolerances for c in self.choice_policies]
        out.sort(key=lambda c: c.sort_key)
        return out


@dataclass(frozen=True)
class ConfigEvaluation:
    config: ScoreConfig
    applicable: bool
    reason: str | None = None
    focal_value: float | None = None
    mean: float | None = None
    diff: float | None = None
    dist: analysis.Distribution | None = None


@dataclass(frozen=True)
class SearchOutcome:
    superunit: str
    district: str
    worst: ConfigEvaluation
    best: ConfigEvaluation
    evaluations: tuple
    worst_below_mean: bool = True


def _district_values(dset: DistrictSet, config: ScoreConfig, seed: int, cache: dict | None):
    """Score every district under the config (ignoring the choice policy,
    which only affects which values enter the distribution)."""
    spec = scores.parse_score_name(config.score_name)
    values = {}
    for d in dset.districts:
        key = (d.key, config.score_name, config.projection, config.tolerance_m)
        if cache is not None and key in cache:
            values[d.key] = cache[key]
            continue
        su = (dset.superunits or {}).get(d.superunit_code)
        if spec.borders and su is None:
            raise ConfigurationError(
                f"{config.score_name} requires superunit geometry for {d.key}")
        projected, projected_su = pipeline.prepare_geometry(
            d.geometry, config.projection, config.tolerance_m,
            su if spec.borders else None)
        v = scores.score_district(projected, spec, projected_su, seed=seed).value
        values[d.key] = v
        if cache is not None:
            cache[key] = v
    return values


def evaluate_config(dset: DistrictSet, focal: tuple, config: ScoreConfig,
                    seed: int = DEFAULT_SEED, cache: dict | None = None) -> ConfigEvaluation:
    """Score the set under one configuration and situate the focal district.

    The focal district being excluded by its own choice policy yields an
    inapplicable (skipped, recorded) result; a border score without superunit
    geometry raises ConfigurationError.
    """
    dset = ingest.flag_sole_districts(dset)
    su_code, d_code = focal
    focal_district = dset.find(su_code, d_code)
    if config.choice_policy == "choice" and focal_district.sole_district:
        return ConfigEvaluation(config, applicable=False,
                                reason="focal district excluded by choice policy")
    working = [d for d in dset.districts
               if not (config.choice_policy == "choice" and d.sole_district)]
    values = _district_values(
        DistrictSet(tuple(working), dset.superunits, dset.resolution_label),
        config, seed, cache)
    dist = analysis.distribution(list(values.values()))
    focal_value = values[focal_district.key]
    diff = abs(focal_value - dist.mean)
    return ConfigEvaluation(config, applicable=True, focal_value=focal_value,
                            mean=dist.mean, diff=diff, dist=dist)


def find_extremes(dset: DistrictSet, focal: tuple, space: SearchSpace,
                  seed: int = DEFAULT_SEED, require_below_mean: bool = True,
                  jobs: int = 1) -> SearchOutcome:
    """Exhaustively enumerate the space and pick the extreme configurations.

    worst: maximal |focal - mean| among configs where the focal district sits
    below the mean (an unsigned mode is available for sensitivity studies);
    best: minimal |focal - mean|. Ties break toward the lexicographically
    first config.
    """
    dset = ingest.flag_sole_districts(dset)
    configs = space.configs()
    cache: dict = {}

    def run(config):
        try:
            return evaluate_config(dset, focal, config, seed=seed, cache=cache)
        except ConfigurationError as e:
            return ConfigEvaluation(config, applicable=False, reason=str(e))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            evaluations = list(pool.map(run, configs))
    else:
        evaluations = [run(c) for c in configs]

    usable = [e for e in evaluations if e.applicable]
    if not usable:
        raise EmptySearchError("no applicable configuration in the search space")

    best = None
    for e in usable:
        if best is None or e.diff < best.diff:
            best = e

    worst = None
    below = [e for e in usable if e.focal_value < e.mean]
    pool_ = below if (require_below_mean and below) else usable
    for e in pool_:
        if worst is None or e.diff > worst.diff:
            worst = e

    return SearchOutcome(superunit=focal[0], district=focal[1],
                         worst=worst, best=best, evaluations=tuple(evaluations),
                         worst_below_mean=bool(below) or not require_below_mean)


REPORT_HEADER = "district,role,value,diff_from_mean,score_name,tolerance_m,projection,choice_policy"


def report_csv(outcome: SearchOutcome) -> str:
    """Two-row report mirroring the worst/best table layout."""
    lines = [REPORT_HEADER]
    for role, e in (("worst", outcome.worst), ("best", outcome.best)):
        c = e.config
        lines.append(f"{outcome.superunit}:{outcome.district},{role},"
                     f"{e.focal_value:.6f},{e.diff:.6f},{c.score_name},"
                     f"{c.tolerance_m:g},{c.projection},{c.choice_policy}")
    return "\n".join(lines) + "\n"
