"""
Diskrete Maße, Kostenmatrizen und Wasserstein-Distanz
"""
