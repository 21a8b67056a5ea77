"""Shared scoring pipeline: project, simplify, filter, score.

Used by the CLI, the HTTP service, and the adversarial search so that every
entry point runs districts through exactly the same steps. Local projections
are fitted per district (to the district's own lon/lat extent); simplification
happens after projection, where the tolerance is meaningful in meters.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import geom, ingest, proj, scores
from .errors import ConfigurationError, InvalidInputError
from .ingest import DistrictSet, ScoreRow
from .mincircle import DEFAULT_SEED

DTYPES = {32: np.float32, 64: np.float64}

CHOICE_POLICIES = ("choice", "nochoice")

#: Scores computable without superunit geometry; the CLI default.
DEFAULT_SCORES = ("PolsbyPopp", "Schwartzbe", "ReockPT", "ReockPS",
                  "CvxHullPT", "CvxHullPS")

KOCH_SCORES = ("PolsbyPopp", "Schwartzbe", "CvxHullPS", "ReockPS")


def prepare_geometry(mp: geom.MultiPolygon, projection_name: str, tolerance_m: float,
                     superunit: geom.MultiPolygon | None = None):
    """Project (locally fitted projections use the district's extent) and
    simplify one district, plus its superunit in the same frame."""
    spec = proj.resolve_projection(projection_name, extent=geom.bounds(mp))
    projected = proj.project(spec, mp)
    projected_su = proj.project(spec, superunit) if superunit is not None else None
    if tolerance_m > 0:
        projected = geom.simplify(projected, tolerance_m)
        if projected_su is not None:
            projected_su = geom.simplify(projected_su, tolerance_m)
    return projected, projected_su


def _check_policy(choice_policy: str):
    if choice_policy not in CHOICE_POLICIES:
        raise InvalidInputError(f"choice policy must be one of {CHOICE_POLICIES},"
                                f" got {choice_policy!r}")


def score_rows(dset: DistrictSet, score_names, projection_name: str,
               tolerance_m: float, choice_policy: str = "nochoice",
               precision: int = 64, seed: int = DEFAULT_SEED, jobs: int = 1) -> list:
    """Score every district in the set under one configuration."""
    _check_policy(choice_policy)
    if precision not in DTYPES:
        raise InvalidInputError(f"precision must be 32 or 64, got {precision}")
    dtype = DTYPES[precision]
    specs = [scores.parse_score_name(n) for n in score_names]
    needs_su = any(s.borders for s in specs)
    dset = ingest.flag_sole_districts(dset)
    working = [d for d in dset.districts
               if not (choice_policy == "choice" and d.sole_district)]

    def run(district):
        su = (dset.superunits or {}).get(district.superunit_code)
        if needs_su and su is None:
            raise ConfigurationError(
                f"district {district.key}: border-constrained score requested "
                f"but no superunit geometry is loaded")
        projected, projected_su = prepare_geometry(
            district.geometry, projection_name, tolerance_m, su if needs_su else None)
        out = []
        for s in specs:
            r = scores.score_district(projected, s, projected_su, dtype=dtype, seed=seed)
            out.append(ScoreRow(district.superunit_code, district.district_code,
                                s.name, projection_name, tolerance_m, choice_policy,
                                r.value))
        return out

    if jobs > 1 and len(working) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            grouped = list(pool.map(run, working))
    else:
        grouped = [run(d) for d in working]
    return [row for rows in grouped for row in rows]


def koch_table(levels, score_names=KOCH_SCORES, seed: int = DEFAULT_SEED):
    """Score the snowflake fixture at each level; returns (rows, geometries)."""
    specs = [scores.parse_score_name(n) for n in score_names]
    rows = []
    geoms = []
    for level in levels:
        mp = geom.koch_snowflake(level)
        geoms.append((level, mp))
        for s in specs:
            r = scores.score_district(mp, s, seed=seed)
            rows.append((level, s.name, r.value))
    return rows, geoms


def koch_csv(rows) -> str:
    lines = ["level,score_name,value"]
    for level, name, value in rows:
        lines.append(f"{level},{name},{value:.6f}")
    return "\n".join(lines) + "\n"
