"""
Kommandos der Kommandozeile (simulate, train, detect, bench, export-mps)
"""
