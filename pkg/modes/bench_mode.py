"""
bench - ADD/FAR-Kurven für OT-Detektor und Gauß-CUSUM-Baseline
"""
import click

from bench.comparison import Comparison
from bench.report import add_far_curve, h_grid_for, parse_h_grid
from bench.scenarios import scenario_from_config
from bench.training import train_scenario
from utils.config import HELP_TEXTS
from utils.errors import ConfigError
from .common import RunContext


@click.command("bench")
@click.option("--preset", default=None, help=HELP_TEXTS["preset"])
@click.option("--seed", type=int, default=None, help=HELP_TEXTS["seed"])
@click.option("--trials", type=int, default=None, help=HELP_TEXTS["trials"])
@click.option("--h-grid", default=None, help=HELP_TEXTS["h_grid"])
@click.option("--detector", type=click.Choice(["both", "ot-only"]), default=None, help=HELP_TEXTS["detector"])
@click.option("--workers", type=int, default=None, help=HELP_TEXTS["workers"])
@click.option("--calibration-streams", type=int, default=None, help=HELP_TEXTS["calibration_streams"])
@click.option("--horizon", type=int, default=None, help=HELP_TEXTS["horizon"])
@click.option("--n1", type=int, default=None, help=HELP_TEXTS["n1"])
@click.option("--n2", type=int, default=None, help=HELP_TEXTS["n2"])
@click.option("--lp-method", type=click.Choice(["auto", "simplex", "highs"]), default=None,
              help=HELP_TEXTS["lp_method"])
@click.pass_context
def bench_command(ctx, preset, seed, trials, h_grid, detector, workers, calibration_streams, horizon, n1,
                  n2, lp_method):
    """Monte-Carlo-Benchmark: trainiert und schreibt eine CSV pro Detektor."""
    run = RunContext(ctx, "bench", {
        "run": {"preset": preset, "seed": seed},
        "bench": {"trials": trials, "h_grid": h_grid, "detector": detector,
                  "workers": workers, "calibration_streams": calibration_streams, "horizon": horizon},
        "training": {"n1": n1, "n2": n2},
        "lp": {"method": lp_method},
    })
    settings = run.section("bench")
    n_trials = int(settings["trials"])
    n_workers = int(settings["workers"])
    n_streams = int(settings["calibration_streams"])
    if n_trials < 1 or n_workers < 1 or n_streams < 1:
        raise ConfigError("[bench] trials, workers und calibration_streams müssen >= 1 sein")
    grid = parse_h_grid(settings["h_grid"])

    sc = scenario_from_config(run.config)
    trained = train_scenario(sc, lp_options=run.lp_options(), sigma_i=run.section("detector").get("sigma_i"))
    detectors = [trained.detector]
    if settings["detector"] == "both":
        detectors.append(trained.baseline)

    reports = []
    for detector in detectors:
        thresholds = h_grid_for(sc, detector, grid, n_streams=n_streams, workers=n_workers)
        report = add_far_curve(sc, detector, thresholds, n_trials, workers=n_workers)
        report.metadata.update(run.metadata())
        csv_path = report.write_csv(run.output_path(None, f"bench_{report.detector_id}.csv"))
        run.meta(csv_path)
        report.write_json(csv_path.with_suffix(".json"))
        click.echo(f"{report.detector_id}: {len(report.rows)} Schwellwerte x {n_trials} Versuche -> {csv_path}")
        reports.append(report)

    if len(reports) == 2:
        Comparison(reports[0], reports[1]).print_summary()
