"""
PSO de intervalos (Gbest y Lbest) para el RAP
Posiciones y velocidades son vectores de intervalos; cada posición se
decodifica a una asignación discreta por el centro de sus componentes
"""

import logging
import time
from concurrent.futures import Executor, ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from analysis.interval_core import ComparisonPolicy, Interval, IntervalVector, SubtractionMode
from optimization.rap_problem import (
    Allocation,
    FitnessCache,
    IntervalFitness,
    RapInstance,
    SolverReport,
    fitness_better,
    max_interval_in_set,
    repair,
)
from utils.errors import InvalidConfig
from utils.seeding import make_rng

logger = logging.getLogger(__name__)

PSO_STREAM = 1
TRACE_COLUMNS = ['iteration', 'best_lo', 'best_hi', 'best_center', 'cost']

# niveles de encode para bits 1 / 0
BIT_ON = 0.75
BIT_OFF = 0.25


class PsoVariant(str, Enum):
    GBEST = "gbest"
    LBEST = "lbest"


class SearchMode(str, Enum):
    """allocation: busca (X | A); interval: fija la asignación y busca r(t) en el conjunto"""

    ALLOCATION = "allocation"
    INTERVAL = "interval"


class PsoParams(BaseModel):
    """Hiperparámetros del PSO (por defecto los del ejemplo uno)"""

    model_config = ConfigDict(extra="forbid")

    swarm: int = Field(30, ge=2)
    iterations: int = Field(50, ge=0)
    archive: int = Field(15, ge=0)
    phi1: float = Field(0.99876, ge=0.0)
    phi2: float = Field(0.99678, ge=0.0)
    w1: float = Field(0.8999, ge=0.0)
    w2: float = Field(0.2466, ge=0.0)
    neighborhood: int = Field(3, ge=1)
    variant: PsoVariant = PsoVariant.GBEST
    subtraction: SubtractionMode = SubtractionMode.MOORE
    search_mode: SearchMode = SearchMode.ALLOCATION
    x_min: float = 0.0
    x_max: float = 1.0
    seed: int = Field(0, ge=0)
    early_stop: bool = False
    early_stop_window: int = Field(20, ge=1)
    early_stop_delta: float = Field(1e-9, ge=0.0)
    local_search: bool = True
    cache_size: int = Field(20_000, ge=1)
    workers: int = Field(1, ge=1)
    runs: int = Field(1, ge=1)
    trials: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _check_box(self) -> "PsoParams":
        if self.x_min >= self.x_max:
            raise ValueError(f"x_min={self.x_min} debe ser menor que x_max={self.x_max}")
        return self

    @classmethod
    def example_one(cls, **overrides) -> "PsoParams":
        return cls(**overrides)

    @classmethod
    def example_two(cls, **overrides) -> "PsoParams":
        values = dict(swarm=50, iterations=100, archive=15, phi1=1.69876, phi2=0.19678, w1=0.20, w2=0.10)
        values.update(overrides)
        return cls(**values)


@dataclass
class Particle:
    """Partícula: posición, velocidad, mejor personal y fitness actual"""

    pos: IntervalVector
    vel: IntervalVector
    pbest_pos: IntervalVector
    pbest_fitness: IntervalFitness
    fitness: IntervalFitness
    allocation: Allocation
    r: Interval
    pbest_allocation: Allocation
    pbest_r: Interval


@dataclass
class SwarmBest:
    """Mejores del enjambre: global o uno por partícula en el anillo"""

    gbest_pos: Optional[IntervalVector] = None
    gbest_fitness: Optional[IntervalFitness] = None
    lbest: List[Tuple[IntervalVector, IntervalFitness]] = field(default_factory=list)

    def target(self, index: int) -> IntervalVector:
        if self.lbest:
            return self.lbest[index][0]
        return self.gbest_pos


def inertia(t: int, t_max: int, w1: float, w2: float) -> float:
    """
    Peso de inercia lineal de w1 (t=0) a w2 (t=t_max)

    Args:
        t: Iteración actual
        t_max: Iteraciones totales
        w1: Inercia inicial
        w2: Inercia final
    """
    if t_max <= 0:
        return w2
    if not 0 <= t <= t_max:
        raise InvalidConfig(f"Iteración {t} fuera de [0, {t_max}]")
    return (w1 - w2) * ((t_max - t) / t_max) + w2


def update_velocity(particle: Particle, best_pos: IntervalVector, omega: float, phi1: float, phi2: float,
                    r1: float, r2: float, mode: SubtractionMode = SubtractionMode.MOORE) -> IntervalVector:
    """
    v' = ω·v + φ1·r1·(pbest − pos) + φ2·r2·(best − pos) sobre extremos pareados

    Args:
        particle: Partícula
        best_pos: Posición del mejor global o del vecindario
        omega: Inercia
        phi1: Coeficiente cognitivo
        phi2: Coeficiente social
        r1: Uniforme en [0, 1]
        r2: Uniforme en [0, 1]
        mode: Resta de intervalos

    Returns:
        Nueva velocidad (sin recortar)
    """
    cognitive = particle.pbest_pos.sub(particle.pos, mode).scale(phi1 * r1)
    social = best_pos.sub(particle.pos, mode).scale(phi2 * r2)
    return particle.vel.scale(omega).add(cognitive).add(social)


def decode(position: IntervalVector, inst: RapInstance, r_point: Optional[float] = None) -> Allocation:
    """
    Posición → asignación: bit = 1 si el centro del componente supera 0.5,
    luego reparación determinista

    Args:
        position: Posición de largo 2·m·n (X y luego A)
        inst: Instancia del RAP
        r_point: Confiabilidad de misión para la reparación

    Returns:
        Asignación factible
    """
    bits = (position.centers > 0.5).astype(np.uint8)
    return repair(inst, Allocation.from_genome(bits, inst.m, inst.n), None, r_point)


def encode(alloc: Allocation, widths: Optional[np.ndarray] = None) -> IntervalVector:
    """
    Asignación → posición centrada en 0.75 para 1 y 0.25 para 0

    Args:
        alloc: Asignación
        widths: Anchos por componente (por defecto posición puntual)
    """
    centers = np.where(alloc.genome() == 1, BIT_ON, BIT_OFF)
    if widths is None:
        return IntervalVector.points(centers)
    half = np.minimum(np.asarray(widths, dtype=float), 2 * BIT_OFF) / 2
    return IntervalVector(centers - half, centers + half)


def nearest_interval(position: IntervalVector, r_set: Tuple[Interval, ...]) -> Interval:
    """Intervalo del conjunto más cercano (distancia de extremos) a una posición de un componente"""
    distances = [abs(r.lo - position.lo[0]) + abs(r.hi - position.hi[0]) for r in r_set]
    return r_set[int(np.argmin(distances))]


def bit_ascent(inst: RapInstance, alloc: Allocation, fitness: IntervalFitness,
               evaluate_fn: Callable[[Allocation], IntervalFitness]) -> Tuple[Allocation, IntervalFitness]:
    """
    Ascenso por bits sobre una asignación: una pasada encendiendo arranques
    (x_ij y a_ij) y luego copias (a_ij), aceptando cada cambio factible que
    mejore bajo la política optimista

    Args:
        inst: Instancia del RAP
        alloc: Asignación de partida
        fitness: Fitness de la asignación de partida
        evaluate_fn: Evaluador (normalmente con caché)

    Returns:
        Mejor asignación encontrada y su fitness
    """
    best, best_fitness = alloc, fitness
    for layer in ("x", "a"):
        current = best.x if layer == "x" else best.a
        for i, j in np.argwhere(inst.supported & (np.asarray(current) == 0)):
            x = np.asarray(best.x, dtype=bool).copy()
            a = np.asarray(best.a, dtype=bool).copy()
            if layer == "x":
                x[i, j] = True
            a[i, j] = True
            candidate = Allocation(x, a)
            candidate_fitness = evaluate_fn(candidate)
            if fitness_better(candidate_fitness, best_fitness, ComparisonPolicy.OPTIMISTIC):
                best, best_fitness = candidate, candidate_fitness
    return best, best_fitness


class IntervalSwarmOptimizer:
    """
    Optimizador PSO de intervalos con variantes Gbest y Lbest
    """

    def __init__(self, inst: RapInstance, params: PsoParams, r: Optional[Interval] = None,
                 allocation: Optional[Allocation] = None):
        """
        Args:
            inst: Instancia del RAP
            params: Hiperparámetros
            r: Intervalo de misión para el modo allocation (por defecto el maximal del conjunto)
            allocation: Asignación fija para el modo interval
        """
        self.inst = inst
        self.params = params
        if r is not None:
            self.r = r
        elif inst.r_set:
            self.r = max_interval_in_set(inst.r_set, ComparisonPolicy.COMBINED)
        else:
            self.r = Interval(1.0, 1.0)
        self.r_point = self.r.center
        self._cache = FitnessCache(inst, params.cache_size)
        self._executor: Optional[Executor] = None

        if params.search_mode is SearchMode.INTERVAL:
            if not inst.r_set:
                raise InvalidConfig("El modo interval requiere un conjunto de intervalos en la instancia")
            ones = np.ones((inst.m, inst.n), dtype=np.uint8)
            self.fixed_allocation = allocation or repair(inst, Allocation(ones, ones), None, self.r_point)
            self.dimensions = 1
            self.lower = min(r.lo for r in inst.r_set)
            self.upper = max(r.hi for r in inst.r_set)
        else:
            self.fixed_allocation = None
            self.dimensions = inst.genome_length
            self.lower, self.upper = params.x_min, params.x_max
        self.box_width = self.upper - self.lower
        # ancho máximo de una posición: la mayor dispersión del conjunto de intervalos
        self.max_width = min(max((r.width for r in inst.r_set), default=0.0), self.box_width)

    def _decode(self, position: IntervalVector) -> Tuple[Allocation, Interval]:
        if self.fixed_allocation is not None:
            return self.fixed_allocation, nearest_interval(position, self.inst.r_set)
        return decode(position, self.inst, self.r_point), self.r

    def _evaluate(self, position: IntervalVector) -> Tuple[Allocation, Interval, IntervalFitness]:
        alloc, r = self._decode(position)
        return alloc, r, self._cache.evaluate(alloc, r)

    def _evaluate_all(self, positions: List[IntervalVector]) -> List[Tuple[Allocation, Interval, IntervalFitness]]:
        if self._executor is not None and len(positions) > 1:
            return list(self._executor.map(self._evaluate, positions))
        return [self._evaluate(position) for position in positions]

    def _initial_positions(self, rng: np.random.Generator) -> List[IntervalVector]:
        widths = [r.width for r in self.inst.r_set] or [0.0]
        low_w, high_w = min(widths), max(widths)
        positions = []
        for _ in range(self.params.swarm):
            centers = rng.uniform(self.lower, self.upper, self.dimensions)
            half = rng.uniform(low_w, high_w, self.dimensions) / 2
            positions.append(IntervalVector(np.clip(centers - half, self.lower, self.upper),
                                            np.clip(centers + half, self.lower, self.upper)))
        return positions

    def _neighbors(self, index: int) -> List[int]:
        radius = self.params.neighborhood // 2
        size = self.params.swarm
        return [(index + offset) % size for offset in range(-radius, radius + 1)]

    @staticmethod
    def _leader(particles: List[Particle], indices: List[int]) -> int:
        """Índice del mejor personal entre indices (pliegue ordenado, política optimista)"""
        leader = indices[0]
        for other in indices[1:]:
            if fitness_better(particles[other].pbest_fitness, particles[leader].pbest_fitness,
                              ComparisonPolicy.OPTIMISTIC):
                leader = other
        return leader

    def swarm_best(self, particles: List[Particle]) -> SwarmBest:
        """Pliegue ordenado de los mejores personales bajo la política optimista"""
        if self.params.variant is PsoVariant.LBEST:
            ring = []
            for index in range(len(particles)):
                best = particles[self._leader(particles, self._neighbors(index))]
                ring.append((best.pbest_pos, best.pbest_fitness))
            return SwarmBest(lbest=ring)
        best = particles[self._leader(particles, list(range(len(particles))))]
        return SwarmBest(gbest_pos=best.pbest_pos, gbest_fitness=best.pbest_fitness)

    def improve_leader(self, particles: List[Particle]) -> Optional[Particle]:
        """
        Ascenso por bits sobre el mejor personal del enjambre; si mejora,
        la asignación se reescribe como posición del mejor personal

        Returns:
            La partícula mejorada o None
        """
        leader = particles[self._leader(particles, list(range(len(particles))))]
        improved, fitness = bit_ascent(self.inst, leader.pbest_allocation, leader.pbest_fitness,
                                       lambda alloc: self._cache.evaluate(alloc, self.r))
        if improved is leader.pbest_allocation:
            return None
        leader.pbest_pos = encode(improved, leader.pbest_pos.widths)
        leader.pbest_allocation, leader.pbest_fitness, leader.pbest_r = improved, fitness, self.r
        logger.debug(f"Ascenso por bits: {fitness.value} costo={fitness.cost}")
        return leader

    def _archive_insert(self, archive: List[Tuple[Allocation, Interval, IntervalFitness]],
                        alloc: Allocation, r: Interval, fitness: IntervalFitness):
        if self.params.archive == 0:
            return
        if any(alloc == kept and r == kept_r for kept, kept_r, _ in archive):
            return
        position = len(archive)
        for index, (_, _, kept_fitness) in enumerate(archive):
            if fitness_better(fitness, kept_fitness, ComparisonPolicy.COMBINED):
                position = index
                break
        archive.insert(position, (alloc, r, fitness))
        del archive[self.params.archive:]

    def run(self) -> SolverReport:
        """
        Inicializa el enjambre, itera velocidad/posición y mantiene mejores y archivo

        Returns:
            SolverReport con la mejor solución (política combinada), traza y archivo
        """
        params = self.params
        started = time.perf_counter()
        pool = ThreadPoolExecutor(max_workers=params.workers) if params.workers > 1 else nullcontext()
        with pool as executor:
            self._executor = executor
            try:
                best_alloc, best_r, best_fitness, archive, rows = self._iterate()
            finally:
                self._executor = None

        wall_time = time.perf_counter() - started
        logger.info(f"✅ PSO terminado: {best_fitness.value} costo={best_fitness.cost} ({wall_time:.2f}s)")
        return SolverReport(solver=f"pso-{params.variant.value}", instance=self.inst.name, best=best_alloc,
                            fitness=best_fitness, trace=pd.DataFrame(rows, columns=TRACE_COLUMNS),
                            params=params.model_dump(mode="json"), seed=params.seed, wall_time=wall_time,
                            r_used=best_r, archive=[(alloc, fitness) for alloc, _, fitness in archive])

    def _iterate(self):
        params = self.params
        rng = make_rng(params.seed, PSO_STREAM)
        logger.info(f"🔄 PSO {params.variant.value} en {self.inst.name}: enjambre={params.swarm} "
                    f"iteraciones={params.iterations} modo={params.search_mode.value} "
                    f"resta={params.subtraction.value} semilla={params.seed}")

        positions = self._initial_positions(rng)
        particles = []
        for position, (alloc, r, fitness) in zip(positions, self._evaluate_all(positions)):
            particles.append(Particle(pos=position, vel=IntervalVector.zeros(self.dimensions),
                                      pbest_pos=position, pbest_fitness=fitness, fitness=fitness,
                                      allocation=alloc, r=r, pbest_allocation=alloc, pbest_r=r))

        archive: List[Tuple[Allocation, Interval, IntervalFitness]] = []
        best = particles[0]
        best_alloc, best_r, best_fitness = best.allocation, best.r, best.fitness
        for particle in particles:
            self._archive_insert(archive, particle.allocation, particle.r, particle.fitness)
            if fitness_better(particle.fitness, best_fitness, ComparisonPolicy.COMBINED):
                best_alloc, best_r, best_fitness = particle.allocation, particle.r, particle.fitness

        ascent = params.local_search and self.fixed_allocation is None
        rows = [self._trace_row(0, best_fitness)]
        for t in range(1, params.iterations + 1):
            omega = inertia(t, params.iterations, params.w1, params.w2)
            bests = self.swarm_best(particles)
            moved = []
            for index, particle in enumerate(particles):
                r1, r2 = rng.random(2)
                velocity = update_velocity(particle, bests.target(index), omega, params.phi1, params.phi2,
                                           r1, r2, params.subtraction).clamp_magnitude(self.box_width)
                particle.vel = velocity
                particle.pos = particle.pos.add(velocity).cap_width(self.max_width).clamp_to_box(self.lower,
                                                                                                 self.upper)
                moved.append(particle.pos)

            for particle, (alloc, r, fitness) in zip(particles, self._evaluate_all(moved)):
                particle.allocation, particle.r, particle.fitness = alloc, r, fitness
                if fitness_better(fitness, particle.pbest_fitness, ComparisonPolicy.OPTIMISTIC):
                    particle.pbest_pos, particle.pbest_fitness = particle.pos, fitness
                    particle.pbest_allocation, particle.pbest_r = alloc, r
                self._archive_insert(archive, alloc, r, fitness)
                if fitness_better(fitness, best_fitness, ComparisonPolicy.COMBINED):
                    best_alloc, best_r, best_fitness = alloc, r, fitness

            if ascent:
                leader = self.improve_leader(particles)
                if leader is not None:
                    self._archive_insert(archive, leader.pbest_allocation, leader.pbest_r, leader.pbest_fitness)
                    if fitness_better(leader.pbest_fitness, best_fitness, ComparisonPolicy.COMBINED):
                        best_alloc, best_r, best_fitness = leader.pbest_allocation, leader.pbest_r, \
                            leader.pbest_fitness

            rows.append(self._trace_row(t, best_fitness))
            logger.debug(f"Iteración {t}: ω={omega:.4f} mejor {best_fitness.value}")
            if params.early_stop and t >= params.early_stop_window:
                gain = rows[-1]['best_center'] - rows[-1 - params.early_stop_window]['best_center']
                if gain < params.early_stop_delta:
                    logger.info(f"⏹️  Parada temprana en la iteración {t}")
                    break

        return best_alloc, best_r, best_fitness, archive, rows

    @staticmethod
    def _trace_row(iteration: int, fitness: IntervalFitness) -> Dict:
        return {'iteration': iteration, 'best_lo': fitness.value.lo, 'best_hi': fitness.value.hi,
                'best_center': fitness.center, 'cost': fitness.cost}


def run(inst: RapInstance, params: PsoParams, r: Optional[Interval] = None,
        allocation: Optional[Allocation] = None) -> SolverReport:
    return IntervalSwarmOptimizer(inst, params, r, allocation).run()
