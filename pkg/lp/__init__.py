"""
Lineare Programme: Aufbau, revidierter Simplex, MPS-Export
"""
