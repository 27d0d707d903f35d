"""
export-mps - WCD-LP als MPS-Datei für externe Solver
"""
import click

from bench.scenarios import scenario_from_config
from bench.training import generate_training_set
from lp.mps import write_mps
from robust.wcd import build_lp, make_problem
from .common import RunContext, training_set_from_csv
from .train_mode import training_options, training_overrides


@click.command("export-mps")
@training_options
@click.option("--out", default=None, help="Ausgabedatei (Default: wcd.mps).")
@click.pass_context
def export_command(ctx, preset, seed, nominal_csv, attacked_csv, n1, n2, eps1, eps2, out):
    """Schreibt das Worst-Case-LP der Trainingsdaten im MPS-Format."""
    run = RunContext(ctx, "export-mps",
                     training_overrides(preset, seed, nominal_csv, attacked_csv, n1, n2, eps1, eps2))
    sc = scenario_from_config(run.config)
    ts = training_set_from_csv(nominal_csv, attacked_csv)
    if ts is None:
        ts = generate_training_set(sc)

    lp = build_lp(make_problem(ts, sc.training.eps1, sc.training.eps2))
    path = run.output_path(out, "wcd.mps")
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(write_mps(lp))
    run.meta(path)
    click.echo(f"LP mit {lp.n_vars} Variablen und {lp.n_rows} Zeilen (n = {ts.n1 + ts.n2}) -> {path}")
