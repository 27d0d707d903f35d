"""
Logging-Konfiguration für die Kommandozeile
"""
import logging

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def setup_logging(verbose: bool = False) -> None:
    """
    Richtet einen einzelnen Stream-Handler am Root-Logger ein.

    Bibliotheksmodule konfigurieren selbst keine Handler, sie holen sich nur
    ihren Logger über logging.getLogger(__name__).

    Args:
        verbose: True = DEBUG, sonst INFO
    """
    root = logging.getLogger()
    level = logging.DEBUG if verbose else logging.INFO

    # Mehrfachaufrufe (z.B. in Tests) sollen keine doppelten Ausgaben erzeugen
    for handler in list(root.handlers):
        if getattr(handler, "_otdetect", False):
            root.removeHandler(handler)

    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler._otdetect = True
    root.addHandler(handler)
    root.setLevel(level)
