"""Command-line entry point: ``credotune run | sweep | report``.

Set ``CREDOTUNE_LOG`` (e.g. ``INFO`` or ``DEBUG``) for progress logging.
"""

from __future__ import annotations

import csv
import logging
import os
import sys
from itertools import combinations
from pathlib import Path

import click
import yaml

from credotune.config import apply_overrides, load_config, parse_config
from credotune.credo_policy import CredoLatticePoint, enumerate_lattice
from credotune.errors import ConfigurationError
from credotune.harness import run_experiment, write_outputs
from credotune.report import load_experiment, ordering, write_report

SWEEP_HEADER = ["psi", "phi", "omega", "mean_final_reward", "ci95", "equality_final"]

log = logging.getLogger("credotune")


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


@click.group()
def main() -> None:
    """Credo-shaped multi-agent reinforcement learning experiments."""
    logging.basicConfig(
        level=os.environ.get("CREDOTUNE_LOG", "WARNING").upper(),
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--override", "overrides", multiple=True, help="dotted.key=value, repeatable")
@click.option("--trials", type=int, default=None)
@click.option("--jobs", type=int, default=1, show_default=True, help="parallel trial workers")
def run(config_path, out_dir, overrides, trials, jobs):
    """Run one experiment and write timeseries.csv, summary.json and checkpoints."""
    overrides = list(overrides) + ([f"trials={trials}"] if trials is not None else [])
    try:
        config = load_config(config_path, overrides)
    except ConfigurationError as err:
        _fail(str(err))
    out = Path(out_dir)
    records, summary = run_experiment(config, jobs=jobs, checkpoint_dir=out / "checkpoints")
    write_outputs(out, records, summary)
    final = summary["final"]
    click.echo(f"final mean population reward: {final['reward_mean']:.4f} (median {final['reward_median']:.4f})")
    click.echo(f"final equality: {final['equality_mean']:.4f}")


def _load_sweep(path: Path) -> tuple[dict, list[tuple[float, float, float]], int]:
    try:
        spec = yaml.safe_load(path.read_text()) or {}
    except (OSError, yaml.YAMLError) as err:
        raise ConfigurationError(f"cannot read sweep spec {path}: {err}") from None
    unknown = set(spec) - {"base_config", "points", "trials", "overrides"}
    if unknown:
        raise ConfigurationError(f"unknown sweep keys: {sorted(unknown)}")
    if "base_config" not in spec:
        raise ConfigurationError("sweep spec needs base_config")
    base_path = (path.parent / spec["base_config"]).resolve()
    try:
        base = yaml.safe_load(base_path.read_text()) or {}
    except (OSError, yaml.YAMLError) as err:
        raise ConfigurationError(f"cannot read base_config {base_path}: {err}") from None
    base = apply_overrides(base, list(spec.get("overrides", [])))
    resolution = parse_config(base).credo_policy.resolution
    raw_points = spec.get("points")
    if raw_points is None:
        points = [p.values for p in enumerate_lattice(resolution)]
    else:
        points = []
        seen = set()
        for k, raw in enumerate(raw_points):
            try:
                lp = CredoLatticePoint.from_credo(tuple(float(x) for x in raw), resolution)
            except (ConfigurationError, TypeError, ValueError) as err:
                raise ConfigurationError(f"points[{k}]: {err}") from None
            if lp.steps in seen:
                raise ConfigurationError(f"points[{k}]: duplicate sweep cell {list(raw)}")
            seen.add(lp.steps)
            points.append(lp.values)
    trials = int(spec.get("trials", parse_config(base).trials))
    return base, points, trials


@main.command()
@click.option("--config", "sweep_path", required=True, type=click.Path(dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--jobs", type=int, default=1, show_default=True)
def sweep(sweep_path, out_dir, jobs):
    """Run one experiment per initial-credo lattice point and write sweep.csv."""
    try:
        base, points, trials = _load_sweep(Path(sweep_path))
        configs = [
            parse_config({**base, "initial_credos": list(p), "trials": trials}) for p in points
        ]
    except ConfigurationError as err:
        _fail(str(err))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for point, config in zip(points, configs):
        name = "cell_" + "_".join(f"{v:.1f}" for v in point)
        log.info("sweep cell %s", name)
        records, summary = run_experiment(config, jobs=jobs)
        write_outputs(out / name, records, summary)
        final = summary["final"]
        rows.append([*(repr(v) for v in point), repr(final["reward_mean"]), repr(final["reward_ci95"]), repr(final["equality_mean"])])
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_HEADER)
        w.writerows(rows)
    click.echo(f"wrote {len(rows)} sweep cells to {out / 'sweep.csv'}")


@main.command()
@click.argument("experiment_dirs", nargs=-1, required=True, type=click.Path(file_okay=False))
@click.option("--out", "out_path", default="report.csv", show_default=True, type=click.Path(dir_okay=False))
def report(experiment_dirs, out_path):
    """Compare final-quartile reward and equality across experiment directories."""
    try:
        results = [load_experiment(Path(d)) for d in experiment_dirs]
    except ConfigurationError as err:
        _fail(str(err))
    width = max(len(r.name) for r in results)
    click.echo(f"{'experiment':<{width}}  trials  reward median [mean ± ci95]      equality median [mean ± ci95]")
    for r in results:
        _, trials, rmed, rmean, rhw, emed, emean, ehw = r.row()
        click.echo(
            f"{r.name:<{width}}  {trials:>6}  {rmed:10.3f} [{rmean:.3f} ± {rhw:.3f}]"
            f"  {emed:8.4f} [{emean:.4f} ± {ehw:.4f}]"
        )
    for a, b in combinations(results, 2):
        click.echo(f"{a.name} vs {b.name}: {ordering(a, b)}")
    write_report(Path(out_path), results)


if __name__ == "__main__":
    main()
