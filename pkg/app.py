#!/usr/bin/env python3
"""
Kommandozeile des OT-Detektors

Kommandos:
1. simulate    Residuenstrom eines Szenarios als CSV
2. train       Worst-Case-Verteilungen lösen, Modell-Artefakt schreiben
3. detect      CUSUM über einen Residuenstrom
4. bench       ADD/FAR-Kurven für OT-Detektor und Baseline
5. export-mps  WCD-LP im MPS-Format

Exit-Codes: 0 Erfolg, 2 Konfiguration, 3 Numerik/Solver, 4 Ein-/Ausgabe
"""
import logging

import click

from modes.bench_mode import bench_command
from modes.detect_mode import detect_command
from modes.export_mode import export_command
from modes.simulate_mode import simulate_command
from modes.train_mode import train_command
from utils.config import HELP_TEXTS, load_config_file
from utils.errors import DetectorError
from utils.log import setup_logging

logger = logging.getLogger(__name__)

IO_EXIT_CODE = 4


class DetectorGroup(click.Group):
    """Übersetzt fachliche Fehler in Meldung + Exit-Code"""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except DetectorError as exc:
            logger.debug("Abbruch", exc_info=True)
            click.echo(f"Fehler: {exc}", err=True)
            ctx.exit(exc.exit_code)
        except OSError as exc:
            logger.debug("Abbruch", exc_info=True)
            location = f" ({exc.filename})" if exc.filename else ""
            click.echo(f"Ein-/Ausgabefehler{location}: {exc.strerror or exc}", err=True)
            ctx.exit(IO_EXIT_CODE)


@click.group(cls=DetectorGroup)
@click.option("--config", "config_path", default=None, help=HELP_TEXTS["config"])
@click.option("--verbose", is_flag=True, default=False, help=HELP_TEXTS["verbose"])
@click.option("--output-dir", default=None, help=HELP_TEXTS["output_dir"])
@click.pass_context
def cli(ctx, config_path, verbose, output_dir):
    """Verteilungsrobuste Angriffserkennung mit optimalem Transport."""
    setup_logging(verbose)
    ctx.obj = {"file_config": load_config_file(config_path), "output_dir": output_dir}


cli.add_command(simulate_command)
cli.add_command(train_command)
cli.add_command(detect_command)
cli.add_command(bench_command)
cli.add_command(export_command)


if __name__ == "__main__":
    cli()
