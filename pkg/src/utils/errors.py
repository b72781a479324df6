"""
Jerarquía de excepciones del toolkit RAP
Cada familia de errores lleva el código de salida que usa la CLI
"""


class RapToolkitError(Exception):
    """Error base del toolkit"""

    exit_code = 1


class InputError(RapToolkitError):
    """Archivo o argumento de entrada inválido (código de salida 2)"""

    exit_code = 2


class InstanceParseError(InputError):
    pass


class AllocationParseError(InputError):
    pass


class InvalidSweepSpec(InputError):
    pass


class NegativeTime(InputError, ValueError):
    pass


class DomainError(RapToolkitError, ValueError):
    """Violación de una invariante del dominio (código de salida 3)"""

    exit_code = 3


class InvalidInterval(DomainError):
    pass


class ZeroInDivisor(DomainError):
    pass


class ShapeMismatch(DomainError):
    pass


class InvalidConfig(DomainError):
    pass


class EnumerationTooLarge(DomainError):
    pass


class NonUniformReadiness(DomainError):
    pass


class NonIdenticalWakeup(DomainError):
    pass


class NoCandidate(DomainError):
    pass


class Unrepairable(DomainError):
    pass


class EmptySet(DomainError):
    pass


class NonConvergence(RapToolkitError):
    """La integración numérica o el solver no convergió (código de salida 4)"""

    exit_code = 4
