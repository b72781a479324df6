"""
Ejecución por lotes: banco de experimentos por línea de comandos
"""
