"""
Oráculo Monte Carlo de la semántica One-Shot-System
Simula readiness y los intentos por función de forma independiente
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from analysis.oss_reliability import OssConfig, effective_wakeup, system_reliability
from utils.errors import InvalidConfig
from utils.seeding import RNG_ALGORITHM, make_rng

logger = logging.getLogger(__name__)

# valores aleatorios por bloque vectorizado
BLOCK_BUDGET = 4_000_000


@dataclass(frozen=True)
class McEstimate:
    """Estimación Monte Carlo de la confiabilidad del sistema"""

    mean: float
    stderr: float
    trials: int
    seed: int
    successes: int
    partitions: int
    rng_algorithm: str = RNG_ALGORITHM

    def to_dict(self) -> Dict:
        return {
            'mean': self.mean,
            'stderr': self.stderr,
            'trials': self.trials,
            'seed': self.seed,
            'successes': self.successes,
            'partitions': self.partitions,
            'rng_algorithm': self.rng_algorithm,
        }


def _count_successes(success_prob: np.ndarray, available: np.ndarray, rd: np.ndarray,
                     trials: int, rng: np.random.Generator) -> int:
    """Cuenta ensayos exitosos en una partición"""
    w, n = success_prob.shape
    block = max(1, BLOCK_BUDGET // (w * (n + 1)))
    successes = 0
    remaining = trials
    while remaining > 0:
        size = min(block, remaining)
        ready = rng.random((size, w)) < rd
        attempts = rng.random((size, w, n)) < success_prob
        served = np.any(attempts & available & ready[:, :, None], axis=1)
        successes += int(np.count_nonzero(np.all(served, axis=1)))
        remaining -= size
    return successes


def simulate(cfg: OssConfig, r_point: float, trials: int, seed: int,
             partition_size: int = 250_000, workers: int = 1) -> McEstimate:
    """
    Estima la confiabilidad del sistema por simulación

    Cada ensayo sortea la disponibilidad de las OICs seleccionadas y, para
    cada función, un intento independiente Bernoulli(r·E_ij) en cada OIC
    lista que la tiene disponible. Los ensayos se dividen en particiones de
    tamaño fijo; la partición k usa el flujo (seed, k), por lo que el
    resultado no depende del número de hilos.

    Args:
        cfg: Configuración del sistema
        r_point: Confiabilidad de misión puntual
        trials: Número de ensayos
        seed: Semilla maestra
        partition_size: Ensayos por partición
        workers: Hilos para procesar particiones

    Returns:
        McEstimate con media y error estándar
    """
    if trials < 1:
        raise InvalidConfig(f"Se requiere al menos un ensayo, recibido {trials}")
    if not 0.0 <= r_point <= 1.0:
        raise InvalidConfig(f"r_point={r_point} fuera de [0, 1]")
    if partition_size < 1:
        raise InvalidConfig(f"partition_size debe ser positivo, recibido {partition_size}")

    sel = list(cfg.selected)
    success_prob = r_point * effective_wakeup(cfg.x, cfg.p).E[sel]
    if cfg.r_cell is not None:
        success_prob = success_prob * cfg.r_cell[sel]
    available = cfg.a[sel]
    rd = cfg.rd[sel]

    sizes: List[int] = [partition_size] * (trials // partition_size)
    if trials % partition_size:
        sizes.append(trials % partition_size)

    def run_partition(index: int) -> int:
        return _count_successes(success_prob, available, rd, sizes[index], make_rng(seed, index))

    logger.debug(f"🔄 Simulando {trials} ensayos en {len(sizes)} particiones (semilla {seed})")
    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            counts = list(executor.map(run_partition, range(len(sizes))))
    else:
        counts = [run_partition(index) for index in range(len(sizes))]

    successes = int(sum(counts))
    mean = successes / trials
    stderr = math.sqrt(mean * (1.0 - mean) / trials)
    return McEstimate(mean=mean, stderr=stderr, trials=trials, seed=int(seed),
                      successes=successes, partitions=len(sizes))


def agreement(cfg: OssConfig, estimate: McEstimate, r_point: float,
              sigmas: float = 4.0, floor: float = 1e-3,
              closed_form: Optional[float] = None) -> Dict:
    """
    Compara la estimación con la forma cerrada

    Returns:
        Diccionario con closed_form, delta, tolerance y verdict ('AGREE' / 'DISAGREE')
    """
    exact = system_reliability(cfg, r_point) if closed_form is None else closed_form
    delta = abs(exact - estimate.mean)
    tolerance = max(sigmas * estimate.stderr, floor)
    return {
        'closed_form': exact,
        'delta': delta,
        'tolerance': tolerance,
        'verdict': 'AGREE' if delta <= tolerance else 'DISAGREE',
    }
