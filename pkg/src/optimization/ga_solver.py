"""
Algoritmo genético de dos fases para el RAP de intervalos
Fase primaria: corridas cortas independientes que siembran la población.
Fase secundaria: umbral, selección proporcional, cruce de dos puntos,
mutación por bit, reparación y elitismo
"""

import logging
import time
from concurrent.futures import Executor, ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from analysis.interval_core import ComparisonPolicy, Interval
from analysis.oss_reliability import OssConfig, best_startup_for_function, function_reliabilities
from optimization.rap_problem import (
    Allocation,
    FitnessCache,
    IntervalFitness,
    RapInstance,
    SolverReport,
    check_cost,
    fitness_better,
    max_interval_in_set,
    random_feasible_allocation,
    repair,
)
from utils.seeding import make_rng

logger = logging.getLogger(__name__)

GA_STREAM = 0
TRACE_COLUMNS = ['generation', 'best_lo', 'best_hi', 'best_center', 'cost']


class GaParams(BaseModel):
    """Hiperparámetros del GA"""

    model_config = ConfigDict(extra="forbid")

    p_size: int = Field(100, ge=2)
    p_cross: float = Field(0.8, ge=0.0, le=1.0)
    p_mutat: float = Field(0.06, ge=0.0, le=1.0)
    m_gen: int = Field(200, ge=0)
    d_runs: int = Field(10, ge=0)
    primary_samples: int = Field(20, ge=1)
    threshold_quantile: float = Field(0.5, ge=0.0, lt=1.0)
    policy: ComparisonPolicy = ComparisonPolicy.COMBINED
    seed: int = Field(0, ge=0)
    primary_phase: bool = True
    early_stop: bool = False
    early_stop_window: int = Field(50, ge=1)
    early_stop_delta: float = Field(1e-9, ge=0.0)
    greedy_seed_cells: int = Field(60, ge=0)
    cache_size: int = Field(20_000, ge=1)
    workers: int = Field(1, ge=1)
    runs: int = Field(1, ge=1)
    trials: int = Field(1, ge=1)


@dataclass
class GaState:
    """Estado de la fase secundaria"""

    population: List[Allocation]
    fitness: List[IntervalFitness]
    elite: Allocation
    elite_fitness: IntervalFitness
    generation: int
    rng: np.random.Generator


def two_point_crossover(first: np.ndarray, second: np.ndarray, c1: int, c2: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Intercambia el segmento [c1, c2) entre dos genomas

    Args:
        first: Genoma del primer padre
        second: Genoma del segundo padre
        c1: Primer punto de corte
        c2: Segundo punto de corte

    Returns:
        Par de hijos
    """
    child_a, child_b = first.copy(), second.copy()
    child_a[c1:c2], child_b[c1:c2] = second[c1:c2], first[c1:c2]
    return child_a, child_b


def greedy_allocation(inst: RapInstance, r_point: float) -> Allocation:
    """
    Solución voraz para instancias grandes

    1. Agrega copias en orden de ganancia rd_i·r·p_ij mientras la latencia de
       las funciones habilitadas quepa en el presupuesto.
    2. Intercambios por pares: habilitar la función en una OIC y
       deshabilitarla en otra si mejora su confiabilidad.
    3. Arranque previo en la OIC elegida por best_startup_for_function,
       de la función más débil a la más fuerte, mientras quepa en el presupuesto.
    """
    rd, p, supported = inst.readiness, inst.wakeup, inst.supported
    a = np.zeros((inst.m, inst.n), dtype=bool)
    x = np.zeros_like(a)

    def latency_ok(matrix: np.ndarray) -> bool:
        return check_cost(inst, Allocation(matrix, matrix)).within_budget

    gains = rd[:, None] * r_point * p
    for flat in np.argsort(-gains, axis=None, kind="stable"):
        i, j = np.unravel_index(flat, gains.shape)
        if not supported[i, j]:
            continue
        trial = a.copy()
        trial[i, j] = True
        if latency_ok(trial) or not a[:, j].any():
            a = trial

    for _ in range(inst.m * inst.n):
        current = function_reliabilities(rd, p, a, r_point)
        best_delta, best_move = 0.0, None
        for j in range(inst.n):
            for off in np.flatnonzero(a[:, j]):
                for on in np.flatnonzero(supported[:, j] & ~a[:, j]):
                    trial = a.copy()
                    trial[off, j], trial[on, j] = False, True
                    if not latency_ok(trial):
                        continue
                    delta = function_reliabilities(rd, p[:, [j]], trial[:, [j]], r_point)[0] - current[j]
                    if delta > best_delta + 1e-15:
                        best_delta, best_move = delta, (off, on, j)
        if best_move is None:
            break
        off, on, j = best_move
        a[off, j], a[on, j] = False, True

    weakest_first = np.argsort(function_reliabilities(rd, p, a, r_point), kind="stable")
    for j in weakest_first:
        cfg = OssConfig(rd=rd, p=p, a=a, x=x, r=Interval.point(r_point))
        i = best_startup_for_function(cfg, int(j), r_point)
        trial = x.copy()
        trial[i, j] = True
        if check_cost(inst, Allocation(trial, a)).within_budget:
            x = trial

    return repair(inst, Allocation(x, a), None, r_point)


class TwoPhaseGeneticAlgorithm:
    """
    GA de dos fases sobre asignaciones (X | A) con fitness de intervalo
    """

    def __init__(self, inst: RapInstance, params: GaParams, r: Optional[Interval] = None):
        """
        Args:
            inst: Instancia del RAP
            params: Hiperparámetros
            r: Intervalo de confiabilidad de misión (por defecto el maximal del conjunto)
        """
        self.inst = inst
        self.params = params
        if r is not None:
            self.r = r
        elif inst.r_set:
            self.r = max_interval_in_set(inst.r_set, params.policy)
        else:
            self.r = Interval(1.0, 1.0)
        self.r_point = self.r.center
        self._cache = FitnessCache(inst, params.cache_size)
        self._executor: Optional[Executor] = None

    def _evaluate_one(self, alloc: Allocation) -> IntervalFitness:
        return self._cache.evaluate(alloc, self.r)

    def evaluate_population(self, population: List[Allocation]) -> List[IntervalFitness]:
        """Evalúa en orden; con el pool de la corrida el resultado es idéntico"""
        if self._executor is not None and len(population) > 1:
            return list(self._executor.map(self._evaluate_one, population))
        return [self._evaluate_one(alloc) for alloc in population]

    def primary_phase(self, rng: np.random.Generator) -> List[Allocation]:
        """
        Población inicial: soluciones que mejoran sucesivamente en d_runs
        corridas cortas de búsqueda aleatoria, semilla voraz en instancias
        grandes y relleno aleatorio factible

        Args:
            rng: Flujo aleatorio del GA

        Returns:
            Lista de p_size asignaciones factibles
        """
        params = self.params
        admitted: List[Tuple[Allocation, IntervalFitness]] = []
        if params.primary_phase:
            for _ in range(params.d_runs):
                best: Optional[IntervalFitness] = None
                for _ in range(params.primary_samples):
                    candidate = random_feasible_allocation(self.inst, rng, self.r_point)
                    fitness = self._evaluate_one(candidate)
                    if best is None or fitness_better(fitness, best, params.policy):
                        best = fitness
                        admitted.append((candidate, fitness))
            if params.d_runs > 0 and self.inst.m * self.inst.n >= params.greedy_seed_cells:
                seed_solution = greedy_allocation(self.inst, self.r_point)
                admitted.insert(0, (seed_solution, self._evaluate_one(seed_solution)))
                logger.debug(f"Semilla voraz: {seed_solution.format_published()}")

        if len(admitted) > params.p_size:
            order = np.argsort([-fit.center for _, fit in admitted], kind="stable")
            admitted = [admitted[k] for k in order[:params.p_size]]
        population = [alloc for alloc, _ in admitted]
        while len(population) < params.p_size:
            population.append(random_feasible_allocation(self.inst, rng, self.r_point))
        logger.debug(f"Fase primaria: {len(admitted)} soluciones admitidas de {params.d_runs} corridas")
        return population

    def initial_state(self) -> GaState:
        rng = make_rng(self.params.seed, GA_STREAM)
        population = self.primary_phase(rng)
        fitness = self.evaluate_population(population)
        elite_index = 0
        for index in range(1, len(population)):
            if fitness_better(fitness[index], fitness[elite_index], self.params.policy):
                elite_index = index
        return GaState(population=population, fitness=fitness, elite=population[elite_index],
                       elite_fitness=fitness[elite_index], generation=0, rng=rng)

    def _mating_pool(self, centers: np.ndarray) -> np.ndarray:
        pool = np.arange(centers.size)
        if self.params.threshold_quantile > 0:
            cutoff = np.quantile(centers, self.params.threshold_quantile)
            filtered = np.flatnonzero(centers >= cutoff)
            if filtered.size >= 2:
                pool = filtered
        return pool

    def step(self, state: GaState) -> GaState:
        """
        Una generación: umbral, selección por ruleta sobre centros, cruce de
        dos puntos, mutación, reparación y elitismo

        Args:
            state: Estado actual

        Returns:
            Nuevo estado
        """
        params, rng = self.params, state.rng
        m, n = self.inst.m, self.inst.n
        centers = np.array([fit.center for fit in state.fitness])
        pool = self._mating_pool(centers)
        weights = centers[pool]
        probabilities = weights / weights.sum() if weights.sum() > 0 else None

        offspring_count = params.p_size - 1
        parents = rng.choice(pool, size=offspring_count + offspring_count % 2, p=probabilities)
        length = 2 * m * n
        genomes: List[np.ndarray] = []
        for k in range(0, parents.size, 2):
            first = state.population[parents[k]].genome()
            second = state.population[parents[k + 1]].genome()
            if length >= 3 and rng.random() < params.p_cross:
                c1, c2 = np.sort(rng.choice(np.arange(1, length), size=2, replace=False))
                first, second = two_point_crossover(first, second, int(c1), int(c2))
            genomes.extend([first, second])

        offspring: List[Allocation] = []
        for genome in genomes[:offspring_count]:
            flips = rng.random(length) < params.p_mutat
            mutated = np.where(flips, 1 - genome, genome)
            offspring.append(repair(self.inst, Allocation.from_genome(mutated, m, n), rng, self.r_point))

        offspring_fitness = self.evaluate_population(offspring)
        elite, elite_fitness = state.elite, state.elite_fitness
        for alloc, fitness in zip(offspring, offspring_fitness):
            if fitness_better(fitness, elite_fitness, params.policy):
                elite, elite_fitness = alloc, fitness

        return GaState(population=[state.elite] + offspring,
                       fitness=[state.elite_fitness] + offspring_fitness,
                       elite=elite, elite_fitness=elite_fitness,
                       generation=state.generation + 1, rng=rng)

    def run(self) -> SolverReport:
        """
        Fase primaria seguida de m_gen generaciones (o parada temprana)

        Returns:
            SolverReport con la mejor asignación y la traza por generación
        """
        params = self.params
        started = time.perf_counter()
        logger.info(f"🔄 GA en {self.inst.name}: p_size={params.p_size} m_gen={params.m_gen} "
                    f"semilla={params.seed} r={self.r}")
        pool = ThreadPoolExecutor(max_workers=params.workers) if params.workers > 1 else nullcontext()
        with pool as executor:
            self._executor = executor
            try:
                state = self.initial_state()
                rows = [self._trace_row(state)]
                for _ in range(params.m_gen):
                    state = self.step(state)
                    rows.append(self._trace_row(state))
                    logger.debug(f"Generación {state.generation}: mejor {state.elite_fitness.value}")
                    if params.early_stop and state.generation >= params.early_stop_window:
                        gain = rows[-1]['best_center'] - rows[-1 - params.early_stop_window]['best_center']
                        if gain < params.early_stop_delta:
                            logger.info(f"⏹️  Parada temprana en la generación {state.generation}")
                            break
            finally:
                self._executor = None
        logger.debug(f"Caché de fitness: {len(self._cache)} entradas, {self._cache.hits} aciertos")

        wall_time = time.perf_counter() - started
        logger.info(f"✅ GA terminado: {state.elite_fitness.value} costo={state.elite_fitness.cost} "
                    f"({wall_time:.2f}s)")
        return SolverReport(solver="ga", instance=self.inst.name, best=state.elite,
                            fitness=state.elite_fitness, trace=pd.DataFrame(rows, columns=TRACE_COLUMNS),
                            params=params.model_dump(mode="json"), seed=params.seed,
                            wall_time=wall_time, r_used=self.r)

    @staticmethod
    def _trace_row(state: GaState) -> Dict:
        value = state.elite_fitness.value
        return {'generation': state.generation, 'best_lo': value.lo, 'best_hi': value.hi,
                'best_center': value.center, 'cost': state.elite_fitness.cost}


def primary_phase(inst: RapInstance, params: GaParams) -> List[Allocation]:
    solver = TwoPhaseGeneticAlgorithm(inst, params)
    return solver.primary_phase(make_rng(params.seed, GA_STREAM))


def step(state: GaState, inst: RapInstance, params: GaParams) -> GaState:
    return TwoPhaseGeneticAlgorithm(inst, params).step(state)


def run(inst: RapInstance, params: GaParams, r: Optional[Interval] = None) -> SolverReport:
    return TwoPhaseGeneticAlgorithm(inst, params, r).run()
