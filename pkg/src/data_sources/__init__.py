"""
Carga de instancias, conjuntos de intervalos y asignaciones publicadas
"""
