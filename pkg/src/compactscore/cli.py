"""Command-line front end.

Every run writes its output file plus a ``<out>.manifest`` sidecar recording
the tool version, the resolved flags, and SHA-256 digests of the inputs, so
any result can be reproduced exactly. Exit codes: 0 success, 1 usage error,
2 data/configuration error.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import click

from . import __version__, advsearch, analysis, ingest, pipeline, proj, scores
from .errors import CompactScoreError
from .mincircle import DEFAULT_SEED


def _split(csv: str) -> list:
    return [tok.strip() for tok in csv.split(",") if tok.strip()]


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write_manifest(out, subcommand: str, params: dict, inputs: dict):
    lines = [f"tool = compactscore {__version__}", f"subcommand = {subcommand}"]
    for k in sorted(params):
        lines.append(f"flag.{k} = {params[k]}")
    for k in sorted(inputs):
        lines.append(f"input.{k}.sha256 = {_sha256(inputs[k])}")
    Path(f"{out}.manifest").write_text("\n".join(lines) + "\n")


def _warn_projections(names):
    if any(n.strip().lower() == "webmercator" for n in names):
        click.echo("warning: webmercator distorts scale far beyond acceptable bounds "
                   "and should never be used for compactness measurement; it is "
                   "supported only to demonstrate that effect", err=True)


def _load_set(districts_path, superunits_path, superunit_property, district_property):
    dset = ingest.read_geojson(Path(districts_path).read_bytes(),
                               (superunit_property, district_property))
    if superunits_path:
        sus, label = ingest.read_superunits(Path(superunits_path).read_bytes(),
                                            superunit_property)
        if label != dset.resolution_label and (label or dset.resolution_label):
            click.echo(f"warning: district resolution {dset.resolution_label!r} differs "
                       f"from superunit resolution {label!r}; data should be at the "
                       f"same resolution and coaligned", err=True)
        dset = ingest.DistrictSet(dset.districts, sus, dset.resolution_label)
    return ingest.flag_sole_districts(dset)


def _parse_levels(text: str) -> list:
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(tok) for tok in _split(text)]


@click.group()
@click.version_option(__version__, prog_name="compactscore")
def cli():
    """Compactness scores for electoral districts, with the implementation
    choices (score variant, projection, simplification, sole-district policy)
    explicit and sweepable."""


@cli.command()
@click.option("--districts", required=True, type=click.Path(exists=True, dir_okay=False),
              help="District GeoJSON FeatureCollection (lon/lat degrees).")
@click.option("--superunits", type=click.Path(exists=True, dir_okay=False),
              help="Superunit (state) GeoJSON, required for B scores.")
@click.option("--scores", "score_names", default=",".join(pipeline.DEFAULT_SCORES),
              show_default=True, help="Comma-separated score names.")
@click.option("--projection", default="aea-conus", show_default=True,
              help="One of: " + ", ".join(proj.CANONICAL_PROJECTIONS))
@click.option("--tolerance", "tolerance_m", type=float, default=0.0, show_default=True,
              help="Simplification tolerance in meters (post-projection).")
@click.option("--choice", "choice_policy", type=click.Choice(["choice", "nochoice"]),
              default="nochoice", show_default=True,
              help="choice drops districts that are their whole superunit.")
@click.option("--precision", type=click.Choice(["32", "64"]), default="64",
              show_default=True, help="Floating-point width for the kernels.")
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--superunit-property", default="superunit", show_default=True)
@click.option("--district-property", default="district", show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def score(districts, superunits, score_names, projection, tolerance_m, choice_policy,
          precision, seed, jobs, superunit_property, district_property, out):
    """Score a district set under one configuration; write a score CSV."""
    _warn_projections([projection])
    dset = _load_set(districts, superunits, superunit_property, district_property)
    names = _split(score_names)
    rows = pipeline.score_rows(dset, names, projection, tolerance_m, choice_policy,
                               int(precision), seed, jobs)
    Path(out).write_text(ingest.write_csv(rows))
    inputs = {"districts": districts}
    if superunits:
        inputs["superunits"] = superunits
    _write_manifest(out, "score", {
        "scores": ",".join(names), "projection": projection,
        "tolerance": f"{tolerance_m:g}", "choice": choice_policy,
        "precision": precision, "seed": seed, "jobs": jobs,
        "superunit_property": superunit_property, "district_property": district_property,
    }, inputs)
    click.echo(f"wrote {out} ({len(rows)} rows)")


@cli.command()
@click.option("--districts", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--superunits", type=click.Path(exists=True, dir_okay=False))
@click.option("--focal", required=True, help="Focal district as superunit:district.")
@click.option("--scores", "score_names", default=",".join(scores.CANONICAL_SCORES),
              show_default=True)
@click.option("--projections", default=",".join(proj.CANONICAL_PROJECTIONS),
              show_default=True)
@click.option("--tolerances", default="0,50,100,500,1000,5000", show_default=True)
@click.option("--policies", default="choice,nochoice", show_default=True)
@click.option("--unsigned", is_flag=True,
              help="Maximize |focal - mean| without requiring focal below mean.")
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--superunit-property", default="superunit", show_default=True)
@click.option("--district-property", default="district", show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def search(districts, superunits, focal, score_names, projections, tolerances, policies,
           unsigned, seed, jobs, superunit_property, district_property, out):
    """Grid-search implementation space for the configs that make the focal
    district look most gerrymandered and most reasonable."""
    proj_names = _split(projections)
    _warn_projections(proj_names)
    dset = _load_set(districts, superunits, superunit_property, district_property)
    if ":" not in focal:
        raise click.UsageError("--focal must look like superunit:district")
    su_code, d_code = focal.split(":", 1)
    space = advsearch.SearchSpace(
        score_names=tuple(_split(score_names)),
        projections=tuple(proj_names),
        tolerances=tuple(float(t) for t in _split(tolerances)),
        choice_policies=tuple(_split(policies)),
    )
    outcome = advsearch.find_extremes(dset, (su_code, d_code), space, seed=seed,
                                      require_below_mean=not unsigned, jobs=jobs)
    Path(out).write_text(advsearch.report_csv(outcome))
    Path(f"{out}.worst_hist.csv").write_text(
        analysis.histogram_csv(outcome.worst.dist, outcome.worst.focal_value))
    Path(f"{out}.best_hist.csv").write_text(
        analysis.histogram_csv(outcome.best.dist, outcome.best.focal_value))
    inputs = {"districts": districts}
    if superunits:
        inputs["superunits"] = superunits
    _write_manifest(out, "search", {
        "focal": focal, "scores": ",".join(space.score_names),
        "projections": ",".join(space.projections),
        "tolerances": ",".join(f"{t:g}" for t in space.tolerances),
        "policies": ",".join(space.choice_policies),
        "unsigned": unsigned, "seed": seed, "jobs": jobs,
        "superunit_property": superunit_property, "district_property": district_property,
    }, inputs)
    applicable = sum(1 for e in outcome.evaluations if e.applicable)
    click.echo(f"wrote {out}; evaluated {len(outcome.evaluations)} configs "
               f"({applicable} applicable)")


@cli.command()
@click.option("--levels", default="1..8", show_default=True,
              help="Level range like 1..8 or a comma list.")
@click.option("--scores", "score_names", default=",".join(pipeline.KOCH_SCORES),
              show_default=True)
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False),
              help="Base path: writes <out>.csv and <out>.geojson.")
def koch(levels, score_names, seed, out):
    """Score the snowflake fixture across resolution levels; the fractal's
    unbounded perimeter is the extreme case of resolution sensitivity."""
    lvls = _parse_levels(levels)
    rows, geoms = pipeline.koch_table(lvls, _split(score_names), seed=seed)
    Path(f"{out}.csv").write_text(pipeline.koch_csv(rows))
    districts = tuple(
        ingest.District(mp, "koch", str(level)) for level, mp in geoms)
    Path(f"{out}.geojson").write_text(
        ingest.write_geojson(ingest.DistrictSet(districts)))
    _write_manifest(out, "koch", {"levels": levels, "scores": score_names, "seed": seed}, {})
    click.echo(f"wrote {out}.csv and {out}.geojson")


@cli.command()
@click.argument("csv_a", type=click.Path(exists=True, dir_okay=False))
@click.argument("csv_b", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def spearman(csv_a, csv_b, out):
    """Rank-correlation matrix between the score columns of two score CSVs."""
    pivot_a = _pivot(ingest.read_csv(Path(csv_a).read_text()))
    pivot_b = _pivot(ingest.read_csv(Path(csv_b).read_text()))
    names_a = sorted(pivot_a)
    names_b = sorted(pivot_b)
    lines = ["score," + ",".join(names_b)]
    for na in names_a:
        cells = []
        for nb in names_b:
            keys = sorted(set(pivot_a[na]) & set(pivot_b[nb]))
            try:
                rho = analysis.spearman([pivot_a[na][k] for k in keys],
                                        [pivot_b[nb][k] for k in keys])
                cells.append(f"{rho:.6f}")
            except CompactScoreError:
                cells.append("")
        lines.append(f"{na}," + ",".join(cells))
    Path(out).write_text("\n".join(lines) + "\n")
    _write_manifest(out, "spearman", {}, {"a": csv_a, "b": csv_b})
    click.echo(f"wrote {out}")


def _pivot(rows):
    out: dict = {}
    for r in rows:
        out.setdefault(r.score_name, {})[f"{r.superunit}:{r.district}"] = r.value
    return out


@cli.command()
@click.option("--districts", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--superunits", type=click.Path(exists=True, dir_okay=False))
@click.option("--scores", "score_names", default=",".join(scores.CANONICAL_SCORES),
              show_default=True)
@click.option("--projection", default="aea-conus", show_default=True)
@click.option("--tolerance", "tolerance_m", type=float, default=0.0, show_default=True)
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--superunit-property", default="superunit", show_default=True)
@click.option("--district-property", default="district", show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def precision(districts, superunits, score_names, projection, tolerance_m, seed,
              superunit_property, district_property, out):
    """Compare binary32 against binary64 score pipelines; report the largest
    percent difference."""
    _warn_projections([projection])
    dset = _load_set(districts, superunits, superunit_property, district_property)
    names = _split(score_names)
    needs_su = any(scores.parse_score_name(n).borders for n in names)
    entries = []
    for d in dset.districts:
        su = (dset.superunits or {}).get(d.superunit_code) if needs_su else None
        projected, projected_su = pipeline.prepare_geometry(
            d.geometry, projection, tolerance_m, su)
        entries.append((d.key, projected, projected_su))
    report = analysis.precision_delta(entries, names, seed=seed)
    Path(out).write_text(report.csv())
    inputs = {"districts": districts}
    if superunits:
        inputs["superunits"] = superunits
    _write_manifest(out, "precision", {
        "scores": ",".join(names), "projection": projection,
        "tolerance": f"{tolerance_m:g}", "seed": seed,
    }, inputs)
    click.echo(f"max percent difference: {report.max_pct_diff:.6f}%")


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP scoring service."""
    import uvicorn

    from .service import app
    uvicorn.run(app, host=host, port=port)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.UsageError as e:
        e.show()
        return 1
    except click.ClickException as e:
        e.show()
        return 1
    except CompactScoreError as e:
        click.echo(f"error: {e}", err=True)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
