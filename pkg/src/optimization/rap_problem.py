"""
Problema de asignación de redundancia con coeficientes de intervalo
Variables de decisión, restricción de latencia, objetivo de intervalo,
reparación de factibilidad y codificación compartida por GA y PSO
"""

import logging
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from analysis.interval_core import ComparisonPolicy, Interval, best_index, is_greater
from analysis.oss_reliability import (
    OssConfig,
    function_reliabilities,
    interval_reliability_all_ready,
    interval_system_reliability,
)
from utils.errors import EmptySet, InvalidConfig, ShapeMismatch, Unrepairable
from utils.seeding import RNG_ALGORITHM

logger = logging.getLogger(__name__)


class CostMode(str, Enum):
    """Cómo se agrega la latencia de arranque: máximo por OIC o suma total"""

    PER_OIC_MAX = "per_oic_max"
    TOTAL = "total"


class Objective(str, Enum):
    ALL_READY = "all_ready"
    FULL = "full"


def max_interval_in_set(r_set: Sequence[Interval],
                        policy: ComparisonPolicy = ComparisonPolicy.COMBINED) -> Interval:
    """
    Elemento maximal de un conjunto de intervalos

    Args:
        r_set: Conjunto de intervalos de confiabilidad de misión
        policy: Política de comparación

    Returns:
        Intervalo maximal (empates: primera aparición)

    Raises:
        EmptySet: si el conjunto está vacío
    """
    if not r_set:
        raise EmptySet("El conjunto de intervalos está vacío")
    return r_set[best_index(r_set, policy)]


@dataclass(frozen=True, eq=False)
class RapInstance:
    """
    Instancia del RAP: parámetros del sistema, presupuesto y conjunto de intervalos

    Args:
        name: Nombre de la instancia
        readiness: rd_i, largo m
        wakeup: p_ij, m×n
        cost: C_ij en ciclos, m×n
        budget: Presupuesto C en ciclos
        r_set: Intervalos de confiabilidad de misión
        function_names: Nombres de las funciones
        unsupported: Celdas donde la función no puede existir
        cost_mode: Agregación del costo de arranque
        objective: Forma del objetivo (todas listas o enumeración completa)
    """

    name: str
    readiness: np.ndarray
    wakeup: np.ndarray
    cost: np.ndarray
    budget: int
    r_set: Tuple[Interval, ...] = ()
    function_names: Tuple[str, ...] = ()
    unsupported: Optional[np.ndarray] = None
    cost_mode: CostMode = CostMode.PER_OIC_MAX
    objective: Objective = Objective.ALL_READY

    def __post_init__(self):
        readiness = np.asarray(self.readiness, dtype=float).reshape(-1)
        wakeup = np.asarray(self.wakeup, dtype=float)
        cost = np.asarray(self.cost)
        if wakeup.ndim != 2:
            raise ShapeMismatch(f"wakeup debe ser una matriz m×n, forma {wakeup.shape}")
        m, n = wakeup.shape
        if readiness.shape != (m,) or cost.shape != (m, n):
            raise ShapeMismatch(
                f"Dimensiones inconsistentes: readiness{readiness.shape} wakeup{wakeup.shape} cost{cost.shape}")
        if np.any(cost < 0) or not np.all(np.equal(np.mod(cost, 1), 0)):
            raise InvalidConfig("Los costos deben ser enteros no negativos (ciclos)")
        if self.budget <= 0:
            raise InvalidConfig(f"El presupuesto debe ser positivo, recibido {self.budget}")
        unsupported = (np.zeros((m, n), dtype=bool) if self.unsupported is None
                       else np.asarray(self.unsupported, dtype=bool))
        if unsupported.shape != (m, n):
            raise ShapeMismatch(f"unsupported debe ser {m}×{n}, forma {unsupported.shape}")
        if np.any(unsupported.all(axis=0)):
            missing = np.flatnonzero(unsupported.all(axis=0)).tolist()
            raise InvalidConfig(f"Funciones sin ninguna OIC soportada: {missing}")
        names = tuple(self.function_names) or tuple(f"F{j + 1}" for j in range(n))
        if len(names) != n:
            raise ShapeMismatch(f"Se esperaban {n} nombres de función, recibidos {len(names)}")

        object.__setattr__(self, "readiness", readiness)
        object.__setattr__(self, "wakeup", wakeup)
        object.__setattr__(self, "cost", cost.astype(np.int64))
        object.__setattr__(self, "budget", int(self.budget))
        object.__setattr__(self, "r_set", tuple(self.r_set))
        object.__setattr__(self, "function_names", names)
        object.__setattr__(self, "unsupported", unsupported)
        object.__setattr__(self, "cost_mode", CostMode(self.cost_mode))
        object.__setattr__(self, "objective", Objective(self.objective))

    @property
    def m(self) -> int:
        return int(self.wakeup.shape[0])

    @property
    def n(self) -> int:
        return int(self.wakeup.shape[1])

    @property
    def supported(self) -> np.ndarray:
        return ~self.unsupported

    @property
    def genome_length(self) -> int:
        return 2 * self.m * self.n

    @cached_property
    def decision_r(self) -> Interval:
        """Intervalo maximal del conjunto, usado para las decisiones puntuales"""
        if not self.r_set:
            return Interval(1.0, 1.0)
        return max_interval_in_set(self.r_set)

    def config_for(self, alloc: "Allocation", r: Interval) -> OssConfig:
        """Construye la configuración OSS de una asignación"""
        a = alloc.a.astype(bool)
        return OssConfig(rd=self.readiness, p=self.wakeup, a=a, x=alloc.x.astype(bool) & a,
                         r=r, cost=self.cost, budget=self.budget)


@dataclass(frozen=True, eq=False)
class Allocation:
    """
    Solución candidata: matrices binarias de arranque X y disponibilidad A

    Args:
        x: Arranque previo m×n
        a: Disponibilidad m×n
    """

    x: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x).astype(np.uint8)
        a = np.asarray(self.a).astype(np.uint8)
        if x.ndim != 2 or x.shape != a.shape:
            raise ShapeMismatch(f"x{x.shape} y a{a.shape} deben ser matrices de igual forma")
        if np.any(x > 1) or np.any(a > 1):
            raise ShapeMismatch("Las matrices de asignación deben ser binarias")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "a", a)

    @classmethod
    def empty(cls, m: int, n: int) -> "Allocation":
        return cls(np.zeros((m, n), dtype=np.uint8), np.zeros((m, n), dtype=np.uint8))

    @classmethod
    def from_genome(cls, bits: Sequence[int], m: int, n: int) -> "Allocation":
        """Decodifica el genoma concatenado (X | A) en orden fila mayor"""
        bits = np.asarray(bits, dtype=np.uint8).reshape(-1)
        if bits.size != 2 * m * n:
            raise ShapeMismatch(f"Genoma de largo {bits.size}, se esperaba {2 * m * n}")
        return cls(bits[:m * n].reshape(m, n), bits[m * n:].reshape(m, n))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.x.shape

    @property
    def u(self) -> np.ndarray:
        """Número de copias de cada función"""
        return self.a.sum(axis=0).astype(int)

    def genome(self) -> np.ndarray:
        return np.concatenate([self.x.reshape(-1), self.a.reshape(-1)])

    def key(self) -> bytes:
        return self.genome().tobytes()

    def format_published(self) -> str:
        """Formato publicado: grupos de bits de X por OIC, '/', fila U"""
        groups = " ".join("".join(str(int(bit)) for bit in row) for row in self.x)
        copies = " ".join(str(int(value)) for value in self.u)
        return f"{groups} / {copies}"

    def to_dict(self) -> Dict:
        return {'x': self.x.tolist(), 'a': self.a.tolist(), 'u': self.u.tolist()}

    def __eq__(self, other) -> bool:
        if not isinstance(other, Allocation):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.x, other.x) and np.array_equal(self.a, other.a)

    def __hash__(self) -> int:
        return hash(self.key())


@dataclass(frozen=True)
class IntervalFitness:
    """Confiabilidad del sistema como intervalo, costo y factibilidad"""

    value: Interval
    cost: int
    feasible: bool

    @property
    def center(self) -> float:
        return self.value.center


@dataclass(frozen=True)
class CostCheck:
    """
    Resultado de la restricción de latencia

    cost es el valor comparado contra el presupuesto según el modo de costo;
    total y per_oic se informan siempre
    """

    cost: int
    within_budget: bool
    total: int
    per_oic: Tuple[int, ...]


def check_cost(inst: RapInstance, alloc: Allocation) -> CostCheck:
    """
    Suma exacta de las latencias de arranque contra el presupuesto

    Args:
        inst: Instancia del RAP
        alloc: Asignación

    Returns:
        CostCheck con el costo del modo activo, el total y los parciales por OIC
    """
    per_oic = (inst.cost * alloc.x.astype(np.int64)).sum(axis=1)
    total = int(per_oic.sum())
    if inst.cost_mode is CostMode.PER_OIC_MAX:
        cost = int(per_oic.max()) if per_oic.size else 0
    else:
        cost = total
    return CostCheck(cost=cost, within_budget=cost <= inst.budget, total=total,
                     per_oic=tuple(int(v) for v in per_oic))


def evaluate(inst: RapInstance, alloc: Allocation, r: Interval,
             objective: Optional[Objective] = None) -> IntervalFitness:
    """
    Evalúa una asignación: intervalo de confiabilidad, costo y factibilidad

    Las asignaciones infactibles reciben igualmente su intervalo sin penalizar.
    objective reemplaza la forma del objetivo de la instancia.

    Raises:
        ShapeMismatch: si la asignación no es m×n
    """
    if alloc.shape != (inst.m, inst.n):
        raise ShapeMismatch(f"Asignación {alloc.shape} para una instancia {inst.m}×{inst.n}")
    cfg = inst.config_for(alloc, r)
    if Objective(objective or inst.objective) is Objective.ALL_READY:
        value = interval_reliability_all_ready(cfg)
    else:
        value = interval_system_reliability(cfg)
    cost = check_cost(inst, alloc)
    feasible = cost.within_budget and bool(np.all(alloc.u >= 1))
    return IntervalFitness(value=value, cost=cost.cost, feasible=feasible)


def fitness_better(candidate: IntervalFitness, incumbent: IntervalFitness,
                   policy: ComparisonPolicy = ComparisonPolicy.COMBINED) -> bool:
    """True si candidate supera estrictamente a incumbent (factible antes que infactible)"""
    if candidate.feasible != incumbent.feasible:
        return candidate.feasible
    return is_greater(candidate.value, incumbent.value, policy)


class FitnessCache:
    """
    Caché LRU de evaluaciones por (asignación, intervalo de misión)

    Args:
        inst: Instancia del RAP
        max_entries: Entradas máximas antes de descartar la menos usada
    """

    def __init__(self, inst: RapInstance, max_entries: int = 20_000):
        if max_entries < 1:
            raise InvalidConfig(f"max_entries debe ser ≥ 1: {max_entries}")
        self.inst = inst
        self.max_entries = max_entries
        self._entries: "OrderedDict[Tuple[bytes, float, float], IntervalFitness]" = OrderedDict()
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def __len__(self) -> int:
        return len(self._entries)

    def evaluate(self, alloc: Allocation, r: Interval) -> IntervalFitness:
        key = (alloc.key(), r.lo, r.hi)
        with self._lock:
            cached = self._entries.get(key)
            if cached is not None:
                self._entries.move_to_end(key)
                self.hits += 1
                return cached
        fitness = evaluate(self.inst, alloc, r)
        with self._lock:
            self.misses += 1
            self._entries[key] = fitness
            self._entries.move_to_end(key)
            while len(self._entries) > self.max_entries:
                self._entries.popitem(last=False)
        return fitness


def _pick(scores: np.ndarray, rng: Optional[np.random.Generator]) -> int:
    """Índice del mejor puntaje; empates al menor índice o al azar si hay rng"""
    ties = np.flatnonzero(scores == scores.max())
    if rng is None or ties.size == 1:
        return int(ties[0])
    return int(rng.choice(ties))


def repair(inst: RapInstance, alloc: Allocation, rng: Optional[np.random.Generator] = None,
           r_point: Optional[float] = None) -> Allocation:
    """
    Restaura la factibilidad de una asignación

    Pasos: respeta las celdas no soportadas, fuerza a_ij = 1 donde x_ij = 1,
    cubre cada función sin copias con la OIC soportada de mayor ganancia
    (E = p) y, mientras el costo exceda el presupuesto, borra el bit de
    arranque con menor pérdida de confiabilidad por ciclo.

    Args:
        inst: Instancia del RAP
        alloc: Asignación a reparar
        rng: Flujo aleatorio para desempates (None: menor índice)
        r_point: Confiabilidad de misión para las ganancias (por defecto el centro de decision_r)

    Returns:
        Asignación factible

    Raises:
        Unrepairable: si una función no tiene ninguna OIC soportada
    """
    r_point = inst.decision_r.center if r_point is None else r_point
    supported = inst.supported
    x = alloc.x.astype(bool) & supported
    a = (alloc.a.astype(bool) & supported) | x
    rd, p = inst.readiness, inst.wakeup

    for j in np.flatnonzero(~a.any(axis=0)):
        candidates = np.flatnonzero(supported[:, j])
        if candidates.size == 0:
            raise Unrepairable(f"La función {inst.function_names[j]} no tiene OIC soportada")
        gains = rd[candidates] * r_point * p[candidates, j]
        a[candidates[_pick(gains, rng)], j] = True

    cost = check_cost(inst, Allocation(x, a))
    while not cost.within_budget:
        per_oic = np.asarray(cost.per_oic)
        rows = per_oic > inst.budget if inst.cost_mode is CostMode.PER_OIC_MAX else np.ones(inst.m, bool)
        cells = np.argwhere(x & (inst.cost > 0) & rows[:, None])
        E = np.where(x, 1.0, p)
        current = function_reliabilities(rd, E, a, r_point)
        scores = np.empty(len(cells))
        for k, (i, j) in enumerate(cells):
            column = E[:, j].copy()
            column[i] = p[i, j]
            reduced = function_reliabilities(rd, column[:, None], a[:, [j]], r_point)[0]
            scores[k] = -(current[j] - reduced) / inst.cost[i, j]
        i, j = cells[_pick(scores, rng)]
        x[i, j] = False
        cost = check_cost(inst, Allocation(x, a))

    return Allocation(x, a)


def random_feasible_allocation(inst: RapInstance, rng: np.random.Generator,
                               r_point: Optional[float] = None) -> Allocation:
    """Asignación aleatoria (bits uniformes sobre celdas soportadas) reparada"""
    a = (rng.random((inst.m, inst.n)) < 0.5) & inst.supported
    x = (rng.random((inst.m, inst.n)) < 0.5) & a
    return repair(inst, Allocation(x, a), rng, r_point)


def place_copies(inst: RapInstance, x: np.ndarray, u: Sequence[int],
                 r_point: Optional[float] = None) -> Allocation:
    """
    Coloca las copias indicadas por U cuando solo se conocen X y U

    Por función: primero las OICs con arranque previo, luego las demás
    celdas soportadas en orden descendente de ganancia rd_i·r·p_ij
    (empates al menor índice).

    Args:
        inst: Instancia del RAP
        x: Matriz de arranque
        u: Copias por función
        r_point: Confiabilidad de misión para las ganancias

    Returns:
        Asignación con A construida
    """
    x = np.asarray(x, dtype=bool)
    u = np.asarray(u, dtype=int).reshape(-1)
    if x.shape != (inst.m, inst.n) or u.shape != (inst.n,):
        raise ShapeMismatch(f"X{x.shape} / U{u.shape} no coinciden con la instancia {inst.m}×{inst.n}")
    r_point = inst.decision_r.center if r_point is None else r_point
    a = np.zeros_like(x)
    for j in range(inst.n):
        started = np.flatnonzero(x[:, j])
        if started.size > u[j]:
            logger.warning(f"⚠️  {inst.function_names[j]}: {started.size} arranques con U={u[j]}, se amplía U")
        others = [i for i in np.flatnonzero(inst.supported[:, j]) if not x[i, j]]
        gains = [-(inst.readiness[i] * r_point * inst.wakeup[i, j]) for i in others]
        ordered = list(started) + [others[k] for k in np.argsort(gains, kind="stable")]
        if u[j] > len(ordered):
            raise InvalidConfig(f"{inst.function_names[j]}: U={u[j]} supera las OICs soportadas")
        a[ordered[:max(int(u[j]), started.size)], j] = True
    return Allocation(x, a)


@dataclass
class SolverReport:
    """Resultado de una corrida de solver"""

    solver: str
    instance: str
    best: Allocation
    fitness: IntervalFitness
    trace: pd.DataFrame
    params: Dict
    seed: int
    wall_time: float
    r_used: Interval
    rng_algorithm: str = RNG_ALGORITHM
    archive: List[Tuple[Allocation, IntervalFitness]] = field(default_factory=list)

    def summary(self) -> Dict:
        """Fila resumen para CSV y manifiesto"""
        return {
            'solver': self.solver,
            'instance': self.instance,
            'seed': self.seed,
            'best_lo': self.fitness.value.lo,
            'best_hi': self.fitness.value.hi,
            'best_center': self.fitness.center,
            'cost': self.fitness.cost,
            'feasible': self.fitness.feasible,
            'r_lo': self.r_used.lo,
            'r_hi': self.r_used.hi,
            'allocation': self.best.format_published(),
            'wall_time': round(self.wall_time, 4),
        }
