"""HTTP scoring service.

A thin FastAPI layer over the same pipeline the CLI uses: GeoJSON in the
request body, score rows or search outcomes back. Run with
``compactscore serve`` or ``uvicorn compactscore.service:app``.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__, advsearch, analysis, ingest, pipeline, proj, scores
from .errors import CompactScoreError
from .mincircle import DEFAULT_SEED

app = FastAPI(title="compactscore", version=__version__)

WEBMERCATOR_WARNING = ("webmercator distorts scale far beyond acceptable bounds and "
                       "should never be used for compactness measurement")


@app.exception_handler(CompactScoreError)
async def _domain_error(request: Request, exc: CompactScoreError):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


class ScoreRowModel(BaseModel):
    superunit: str
    district: str
    score_name: str
    projection: str
    tolerance_m: float
    choice_policy: str
    value: float


class ScoreRequest(BaseModel):
    districts: dict = Field(description="GeoJSON FeatureCollection, lon/lat degrees")
    superunits: dict | None = None
    scores: list[str] = Field(default_factory=lambda: list(pipeline.DEFAULT_SCORES))
    projection: str = "aea-conus"
    tolerance_m: float = 0.0
    choice_policy: str = "nochoice"
    precision: int = 64
    seed: int = DEFAULT_SEED
    superunit_property: str = "superunit"
    district_property: str = "district"


class ScoreResponse(BaseModel):
    rows: list[ScoreRowModel]
    csv: str
    warnings: list[str] = Field(default_factory=list)


def _build_set(req) -> tuple:
    warnings = []
    dset = ingest.read_geojson(json.dumps(req.districts),
                               (req.superunit_property, req.district_property))
    if req.superunits is not None:
        sus, label = ingest.read_superunits(json.dumps(req.superunits),
                                            req.superunit_property)
        if label != dset.resolution_label and (label or dset.resolution_label):
            warnings.append(f"district resolution {dset.resolution_label!r} differs "
                            f"from superunit resolution {label!r}")
        dset = ingest.DistrictSet(dset.districts, sus, dset.resolution_label)
    return ingest.flag_sole_districts(dset), warnings


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.get("/meta")
def meta():
    return {
        "version": __version__,
        "scores": list(scores.CANONICAL_SCORES),
        "projections": list(proj.CANONICAL_PROJECTIONS),
        "default_tolerances": list(advsearch.DEFAULT_TOLERANCES),
    }


@app.post("/score", response_model=ScoreResponse)
def score_endpoint(req: ScoreRequest):
    dset, warnings = _build_set(req)
    if req.projection.lower() == "webmercator":
        warnings.append(WEBMERCATOR_WARNING)
    rows = pipeline.score_rows(dset, req.scores, req.projection, req.tolerance_m,
                               req.choice_policy, req.precision, req.seed)
    rows = sorted(rows, key=lambda r: (r.superunit, r.district, r.score_name))
    return ScoreResponse(rows=[ScoreRowModel(**r.__dict__) for r in rows],
                         csv=ingest.write_csv(rows), warnings=warnings)


class SearchRequest(BaseModel):
    districts: dict
    superunits: dict | None = None
    focal: str = Field(description="superunit:district")
    scores: list[str] = Field(default_factory=lambda: list(scores.CANONICAL_SCORES))
    projections: list[str] = Field(default_factory=lambda: list(proj.CANONICAL_PROJECTIONS))
    tolerances: list[float] = Field(default_factory=lambda: list(advsearch.DEFAULT_TOLERANCES))
    policies: list[str] = Field(default_factory=lambda: ["choice", "nochoice"])
    unsigned: bool = False
    seed: int = DEFAULT_SEED
    superunit_property: str = "superunit"
    district_property: str = "district"


class ConfigModel(BaseModel):
    score_name: str
    projection: str
    tolerance_m: float
    choice_policy: str


class ExtremeModel(BaseModel):
    config: ConfigModel
    value: float
    mean: float
    diff_from_mean: float
    histogram_counts: list[int]


class SearchResponse(BaseModel):
    superunit: str
    district: str
    worst: ExtremeModel
    best: ExtremeModel
    worst_below_mean: bool
    configs_evaluated: int
    configs_applicable: int
    csv: str
    warnings: list[str] = Field(default_factory=list)


def _extreme(e) -> ExtremeModel:
    return ExtremeModel(config=ConfigModel(**e.config.__dict__), value=e.focal_value,
                        mean=e.mean, diff_from_mean=e.diff,
                        histogram_counts=list(e.dist.counts))


@app.post("/search", response_model=SearchResponse)
def search_endpoint(req: SearchRequest):
    dset, warnings = _build_set(req)
    if any(p.lower() == "webmercator" for p in req.projections):
        warnings.append(WEBMERCATOR_WARNING)
    if ":" not in req.focal:
        raise HTTPException(status_code=400, detail="focal must look like superunit:district")
    su_code, d_code = req.focal.split(":", 1)
    space = advsearch.SearchSpace(tuple(req.scores), tuple(req.projections),
                                  tuple(req.tolerances), tuple(req.policies))
    outcome = advsearch.find_extremes(dset, (su_code, d_code), space, seed=req.seed,
                                      require_below_mean=not req.unsigned)
    applicable = sum(1 for e in outcome.evaluations if e.applicable)
    return SearchResponse(superunit=outcome.superunit, district=outcome.district,
                          worst=_extreme(outcome.worst), best=_extreme(outcome.best),
                          worst_below_mean=outcome.worst_below_mean,
                          configs_evaluated=len(outcome.evaluations),
                          configs_applicable=applicable,
                          csv=advsearch.report_csv(outcome), warnings=warnings)


class KochRow(BaseModel):
    level: int
    score_name: str
    value: float


class KochResponse(BaseModel):
    rows: list[KochRow]
    geojson: dict


@app.get("/koch", response_model=KochResponse)
def koch_endpoint(levels: str = "1..8", score_names: str = ",".join(pipeline.KOCH_SCORES),
                  seed: int = DEFAULT_SEED):
    if ".." in levels:
        lo, hi = levels.split("..")
        lvls = list(range(int(lo), int(hi) + 1))
    else:
        lvls = [int(t) for t in levels.split(",") if t.strip()]
    names = [t.strip() for t in score_names.split(",") if t.strip()]
    rows, geoms = pipeline.koch_table(lvls, names, seed=seed)
    districts = tuple(ingest.District(mp, "koch", str(level)) for level, mp in geoms)
    doc = json.loads(ingest.write_geojson(ingest.DistrictSet(districts)))
    return KochResponse(rows=[KochRow(level=lv, score_name=n, value=v)
                              for lv, n, v in rows], geojson=doc)


class SpearmanRequest(BaseModel):
    a_csv: str
    b_csv: str


class SpearmanResponse(BaseModel):
    scores_a: list[str]
    scores_b: list[str]
    matrix: list[list[float | None]]


@app.post("/spearman", response_model=SpearmanResponse)
def spearman_endpoint(req: SpearmanRequest):
    def pivot(rows):
        out: dict = {}
        for r in rows:
            out.setdefault(r.score_name, {})[f"{r.superunit}:{r.district}"] = r.value
        return out

    pa = pivot(ingest.read_csv(req.a_csv))
    pb = pivot(ingest.read_csv(req.b_csv))
    names_a = sorted(pa)
    names_b = sorted(pb)
    matrix = []
    for na in names_a:
        row = []
        for nb in names_b:
            keys = sorted(set(pa[na]) & set(pb[nb]))
            try:
                row.append(analysis.spearman([pa[na][k] for k in keys],
                                             [pb[nb][k] for k in keys]))
            except CompactScoreError:
                row.append(None)
        matrix.append(row)
    return SpearmanResponse(scores_a=names_a, scores_b=names_b, matrix=matrix)
