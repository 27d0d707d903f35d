"""
Fehlerklassen für Simulation, Optimierung und Detektion

Jede Klasse trägt den Exit-Code, mit dem die Kommandozeile beendet wird.
"""


class DetectorError(Exception):
    """Basisklasse aller fachlichen Fehler"""
    exit_code = 1


class ConfigError(DetectorError, ValueError):
    """Ungültige Konfiguration (unbekanntes Preset, fehlender Schlüssel, ...)"""
    exit_code = 2


class ValidationError(DetectorError, ValueError):
    """Invariante eines Datentyps bei der Konstruktion verletzt"""
    exit_code = 2


class DimensionError(DetectorError, ValueError):
    """Inkompatible Dimensionen von Matrizen oder Vektoren"""
    exit_code = 2


class DomainError(DetectorError, ValueError):
    """Argument außerhalb des mathematischen Definitionsbereichs"""
    exit_code = 2


class NumericalError(DetectorError, RuntimeError):
    """Numerisches Problem (singuläre Matrix, Solver-Fehler)"""
    exit_code = 3


class ConvergenceError(NumericalError):
    """Iteration hat innerhalb der erlaubten Schritte nicht konvergiert"""


class SolverError(NumericalError):
    """LP-Solver hat keinen optimalen Status erreicht"""


class WcdInternalError(SolverError):
    """Das Worst-Case-LP ist unzulässig oder unbeschränkt - deutet auf einen Aufbaufehler hin"""


class DataFormatError(DetectorError, ValueError):
    """Fehlerhafte Eingabedatei (CSV/JSON)"""
    exit_code = 4

    def __init__(self, message: str, path: str = None, line: int = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location += f"{path}"
        if line is not None:
            location += f":{line}" if location else f"Zeile {line}"
        super().__init__(f"{location}: {message}" if location else message)
