"""
Construcción de generadores aleatorios reproducibles
Todos los flujos usan Philox (contador) derivado de SeedSequence([semilla, índices...])
"""

from typing import Optional

import numpy as np

RNG_ALGORITHM = "numpy Philox-4x64 / SeedSequence([seed, *stream])"


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """
    Crea un generador determinista para el flujo (seed, *stream)

    Args:
        seed: Semilla maestra
        stream: Índices adicionales (partición, corrida, etc.)

    Returns:
        Generador numpy basado en Philox
    """
    sequence = np.random.SeedSequence([int(seed) % 2**64, *[int(s) for s in stream]])
    return np.random.Generator(np.random.Philox(sequence))


def derive_seed(master_seed: int, index: int) -> int:
    """
    Regla de partición de semillas: la corrida k usa los primeros 64 bits de
    SeedSequence([master_seed, k])

    Args:
        master_seed: Semilla maestra
        index: Índice de corrida o repetición

    Returns:
        Semilla de 64 bits
    """
    words = np.random.SeedSequence([int(master_seed) % 2**64, int(index)]).generate_state(2, np.uint32)
    return int(words[0]) | (int(words[1]) << 32)


def resolve_seed(seed: Optional[int]) -> int:
    """Devuelve la semilla dada o una nueva semilla de entropía del sistema"""
    if seed is not None:
        return int(seed)
    return int(np.random.SeedSequence().generate_state(1, np.uint64)[0])
