"""
train - Worst-Case-Verteilungen lösen und Modell-Artefakt schreiben
"""
from dataclasses import replace

import click

from bench.scenarios import scenario_from_config
from bench.training import fit_model, train_scenario
from robust.artifact import save_model
from utils.config import HELP_TEXTS
from .common import RunContext, training_set_from_csv


def training_options(function):
    """Gemeinsame Optionen von train und export-mps"""
    options = [
        click.option("--preset", default=None, help=HELP_TEXTS["preset"]),
        click.option("--seed", type=int, default=None, help=HELP_TEXTS["seed"]),
        click.option("--nominal-csv", default=None, help=HELP_TEXTS["nominal_csv"]),
        click.option("--attacked-csv", default=None, help=HELP_TEXTS["attacked_csv"]),
        click.option("--n1", type=int, default=None, help=HELP_TEXTS["n1"]),
        click.option("--n2", type=int, default=None, help=HELP_TEXTS["n2"]),
        click.option("--eps1", type=float, default=None, help=HELP_TEXTS["eps1"]),
        click.option("--eps2", type=float, default=None, help=HELP_TEXTS["eps2"]),
    ]
    for option in reversed(options):
        function = option(function)
    return function


def training_overrides(preset, seed, nominal_csv, attacked_csv, n1, n2, eps1, eps2, **training):
    """Kommandozeilen-Optionen als Konfigurationsebene"""
    return {
        "run": {"preset": preset, "seed": seed},
        "inputs": {"nominal_csv": nominal_csv, "attacked_csv": attacked_csv},
        "training": {"n1": n1, "n2": n2, "eps1": eps1, "eps2": eps2, **training},
    }


@click.command("train")
@training_options
@click.option("--bandwidth", type=float, default=None, help="Bandbreite σ des Gauß-Kerns.")
@click.option("--clip", type=float, default=None, help="Clipping-Grenze c (0 = ohne Clipping).")
@click.option("--sigma-i", type=float, default=None, help=HELP_TEXTS["sigma_i"])
@click.option("--lp-method", type=click.Choice(["auto", "simplex", "highs"]), default=None,
              help=HELP_TEXTS["lp_method"])
@click.option("--out", default=None, help=HELP_TEXTS["out"])
@click.pass_context
def train_command(ctx, preset, seed, nominal_csv, attacked_csv, n1, n2, eps1, eps2,
                  bandwidth, clip, sigma_i, lp_method, out):
    """Trainiert den OT-Detektor (Preset-Simulation oder Residuen-CSVs)."""
    overrides = training_overrides(preset, seed, nominal_csv, attacked_csv, n1, n2, eps1, eps2,
                                   bandwidth=bandwidth, clip=clip)
    overrides["lp"] = {"method": lp_method}
    overrides["detector"] = {"sigma_i": sigma_i}
    run = RunContext(ctx, "train", overrides)
    sc = scenario_from_config(run.config)
    configured_sigma = run.section("detector").get("sigma_i")

    ts = training_set_from_csv(nominal_csv, attacked_csv)
    if ts is None:
        trained = train_scenario(sc, lp_options=run.lp_options(), sigma_i=configured_sigma)
    else:
        # Drift-Offset wird auf den nominalen Trainingsresiduen angepasst
        params = replace(sc.training, n1=ts.n1, n2=ts.n2)
        trained = fit_model(ts, params, ts.X1, seed=sc.seed, digest=run.digest,
                            lp_options=run.lp_options(), sigma_i=configured_sigma)

    artifact = trained.artifact
    artifact.metadata = {"seed": run.seed, "config_digest": run.digest}
    path = save_model(artifact, run.output_path(out, "model.json"))

    click.echo(f"V*             = {artifact.V_star:.8f}")
    click.echo(f"TV*            = {artifact.tv_star:.8f}")
    click.echo(f"Minimax-Risiko = {artifact.minmax_risk:.8f}")
    click.echo(f"eps = ({artifact.eps1:g}, {artifact.eps2:g}), "
               f"n = ({trained.training_set.n1}, {trained.training_set.n2})")
    click.echo(f"Modell -> {path}")
