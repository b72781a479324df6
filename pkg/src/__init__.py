"""
Interval RAP Toolkit - Confiabilidad de sistemas multinúcleo con OICs en espera tibia

Este paquete contiene todos los módulos necesarios para:
- Aritmética de intervalos y relaciones de orden
- Confiabilidad One-Shot-System y oráculo Monte Carlo
- Problema de asignación de redundancia con GA y PSO de intervalos
- Utilidades de configuración y logging
"""

__version__ = "1.0.0"
