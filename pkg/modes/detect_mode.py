"""
detect - CUSUM über einen Residuenstrom mit festem oder kalibriertem Schwellwert
"""
from pathlib import Path

import click

from bench.training import detectors_from_artifact
from detection.cusum import ThresholdPolicy
from robust.artifact import load_model
from systems.simulation import read_residual_csv
from utils.config import HELP_TEXTS
from utils.errors import ConfigError
from utils.files import write_json
from .common import RunContext


def threshold_policy(h, eta) -> ThresholdPolicy:
    """Fester Schwellwert oder Kalibrierung über eta (genau eines von beiden)"""
    if h is not None and eta is not None:
        raise ConfigError("Entweder [detector] h oder eta angeben, nicht beides")
    if h is not None:
        if not float(h) > 0:
            raise ConfigError(f"[detector] h muss positiv sein, ist {h}")
        return ThresholdPolicy.fixed(float(h))
    if eta is not None:
        if not 0 < float(eta) < 1:
            raise ConfigError(f"[detector] eta muss in (0, 1) liegen, ist {eta}")
        return ThresholdPolicy.tail_bound(float(eta))
    raise ConfigError("Schwellwert fehlt: --h oder --eta angeben")


@click.command("detect")
@click.option("--model", "model_path", required=True, help=HELP_TEXTS["model"])
@click.option("--residuals", required=True, help=HELP_TEXTS["residuals"])
@click.option("--h", "h", type=float, default=None, help=HELP_TEXTS["h"])
@click.option("--eta", type=float, default=None, help=HELP_TEXTS["eta"])
@click.option("--sigma-i", type=float, default=None, help=HELP_TEXTS["sigma_i"])
@click.option("--detector", type=click.Choice(["ot", "baseline"]), default="ot", show_default=True,
              help="Detektor aus dem Modell-Artefakt.")
@click.option("--out", default=None, help="Ausgabe-CSV (t,score,S,alarm); die Zusammenfassung landet daneben als .json.")
@click.pass_context
def detect_command(ctx, model_path, residuals, h, eta, sigma_i, detector, out):
    """Überwacht einen Residuenstrom und meldet den ersten Alarm."""
    run = RunContext(ctx, "detect", {
        "detector": {"h": h, "eta": eta, "sigma_i": sigma_i},
        "inputs": {"model": model_path, "residuals": residuals, "detector": detector},
    })
    settings = run.section("detector")
    policy = threshold_policy(settings.get("h"), settings.get("eta"))

    artifact = load_model(model_path)
    stream = read_residual_csv(residuals)
    ot_detector, baseline = detectors_from_artifact(artifact, sigma_i=settings.get("sigma_i"))
    chosen = ot_detector if detector == "ot" else baseline
    if chosen is None:
        raise ConfigError(f"{model_path} enthält keine Baseline")
    if chosen.dim != stream.d_y:
        raise ConfigError(f"Modell hat Dimension {chosen.dim}, Residuen in {residuals} haben {stream.d_y}")

    result = chosen.run(stream, policy)
    if policy.mode == "tail_bound":
        click.echo(f"Kalibrierter Schwellwert h = sqrt(8 * V_t * ln(2 / eta)) = {result.h:.6f} "
                   f"(V_t = {result.V_t:g}, eta = {policy.eta:g})")

    path = run.output_path(out, "detection.csv")
    result.frame().to_csv(path, index=False, lineterminator="\n")
    model_seed = artifact.metadata.get("seed")
    run.meta(path, model_seed=model_seed)
    summary = {**result.summary(), "seed": run.seed, "model_seed": model_seed, "config_digest": run.digest,
               "model_digest": artifact.metadata.get("config_digest")}
    summary_path = write_json(Path(path).with_suffix(".json"), summary)

    if result.detected:
        click.echo(f"Alarm bei Schritt {result.tau_det} (Residuum t = {result.alarm_residual_time}), h = {result.h:.6f}")
    else:
        click.echo(f"Kein Alarm (h = {result.h:.6f}, max S = {result.S.max() if result.S.size else 0.0:.6f})")
    click.echo(f"Detektion -> {path}, Zusammenfassung -> {summary_path}")
