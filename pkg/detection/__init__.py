"""
Score-Funktionen, CUSUM und Schwellwert-Kalibrierung
"""
