"""
Hilfsmodule: Konfiguration, Fehlerklassen, Logging, Zufallsströme, Dateien
"""
