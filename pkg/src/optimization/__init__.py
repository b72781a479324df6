"""
Problema de asignación de redundancia y solvers GA / PSO
"""
