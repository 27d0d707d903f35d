"""
Vergleich OT-Detektor gegen Gauß-CUSUM-Baseline
"""
from dataclasses import dataclass
from typing import List, Optional

import click

from .report import BenchReport, CurveRow


@dataclass
class MatchedPoint:
    """Ein Rasterpunkt des OT-Detektors mit dem FAR-nächsten Baseline-Punkt"""
    ot: CurveRow
    baseline: CurveRow

    @property
    def ot_wins(self) -> Optional[bool]:
        """
        ADD_ot <= ADD_baseline.

        Erkennt nur der OT-Detektor (Baseline ohne ADD), zählt das als Gewinn;
        ohne OT-ADD gibt es kein Urteil (None).
        """
        if self.ot.add is None:
            return None
        if self.baseline.add is None:
            return self.ot.n_detected > 0
        return self.ot.add <= self.baseline.add


class Comparison:
    """Vergleicht zwei ADD/FAR-Kurven bei übereinstimmender FAR"""

    def __init__(self, ot: BenchReport, baseline: BenchReport):
        """
        Args:
            ot: Kurve des OT-Detektors
            baseline: Kurve der Baseline
        """
        if not ot.rows or not baseline.rows:
            raise ValueError("Beide Kurven brauchen mindestens eine Zeile")
        self.ot = ot
        self.baseline = baseline

    def matched(self) -> List[MatchedPoint]:
        """Paarung über die nächste FAR (bei Gleichstand der kleinere Schwellwert)"""
        pairs = []
        for row in self.ot.rows:
            partner = min(self.baseline.rows, key=lambda other: (abs(other.far - row.far), other.h))
            pairs.append(MatchedPoint(row, partner))
        return pairs

    def win_fraction(self) -> float:
        """Anteil der Rasterpunkte mit ADD_ot <= ADD_baseline (Punkte ohne OT-ADD zählen nicht als Gewinn)"""
        pairs = self.matched()
        return sum(bool(pair.ot_wins) for pair in pairs) / len(pairs)

    def print_summary(self):
        """Gibt beide Kurven und den Vergleich aus"""
        for report in (self.ot, self.baseline):
            click.echo("\n" + "=" * 80)
            click.echo(f"ADD/FAR-KURVE: {report.detector_id}")
            click.echo("=" * 80 + "\n")
            click.echo(f"{'h':>12}{'eta':>12}{'FAR':>10}{'ADD':>10}{'erkannt':>10}{'verpasst':>10}")
            click.echo("-" * 80)
            for row in report.rows:
                eta = f"{row.eta:.2e}" if row.eta is not None else "-"
                add = f"{row.add:.2f}" if row.add is not None else "-"
                click.echo(f"{row.h:>12.4f}{eta:>12}{row.far:>10.3f}{add:>10}"
                           f"{row.n_detected:>10}{row.n_missed:>10}")

        click.echo("\n" + "=" * 80)
        click.echo("VERGLEICH BEI GLEICHER FAR")
        click.echo("=" * 80 + "\n")
        for pair in self.matched():
            verdict = {True: "OT besser/gleich", False: "Baseline besser", None: "keine OT-ADD"}[pair.ot_wins]
            click.echo(f"   FAR {pair.ot.far:.3f} / {pair.baseline.far:.3f}: {verdict}")
        click.echo(f"\n   Anteil OT-ADD <= Baseline-ADD: {self.win_fraction() * 100:.1f} %")
