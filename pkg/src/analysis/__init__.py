"""
Módulos de análisis: intervalos, confiabilidad OSS, oráculo Monte Carlo y reportes
"""
