"""
Utilidades: configuración, errores, semillas y logging
"""

__version__ = "1.0.0"
