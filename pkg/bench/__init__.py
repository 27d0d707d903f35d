"""
Monte-Carlo-Benchmark am Vier-Tank-System
"""
