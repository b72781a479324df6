"""
Datos de referencia: conjuntos de intervalos, instancias y asignaciones publicadas
"""
