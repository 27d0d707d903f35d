"""
Strecke, Beobachter und Residuen-Simulation
"""
