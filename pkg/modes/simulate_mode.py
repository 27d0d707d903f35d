"""
simulate - Residuenstrom eines Szenarios als CSV
"""
import click

from bench.scenarios import scenario_from_config
from systems.simulation import simulate_attacked, simulate_nominal, write_residual_csv
from utils.config import HELP_TEXTS
from utils.seeding import make_rng
from .common import RunContext


@click.command("simulate")
@click.option("--preset", default=None, help=HELP_TEXTS["preset"])
@click.option("--seed", type=int, default=None, help=HELP_TEXTS["seed"])
@click.option("--horizon", type=int, default=None, help=HELP_TEXTS["horizon"])
@click.option("--regime", type=click.Choice(["nominal", "attacked"]), default="nominal",
              show_default=True, help=HELP_TEXTS["regime"])
@click.option("--out", default=None, help=HELP_TEXTS["out"])
@click.pass_context
def simulate_command(ctx, preset, seed, horizon, regime, out):
    """Simuliert Residuen (nominal oder mit Täuschungsangriff)."""
    run = RunContext(ctx, "simulate", {
        "run": {"preset": preset, "seed": seed},
        "simulate": {"horizon": horizon, "regime": regime},
    })
    sc = scenario_from_config(run.config)
    steps = horizon if horizon is not None else sc.horizon
    rng = make_rng(sc.seed, 0, "plant")

    if regime == "nominal":
        stream = simulate_nominal(sc.system, sc.observer, sc.nominal_noise, steps, rng)
    else:
        stream = simulate_attacked(sc.system, sc.observer, sc.nominal_noise, sc.attack, steps, rng,
                                   attack_rng=make_rng(sc.seed, 0, "attack"))

    path = run.output_path(out, f"residuals_{regime}.csv")
    write_residual_csv(stream, path)
    run.meta(path)
    click.echo(f"{stream.horizon} Residuen ({regime}, {sc.name}, Seed {sc.seed}) -> {path}")
