"""
Worst-Case-Verteilungen über Wasserstein-Ambiguitätsmengen
"""
