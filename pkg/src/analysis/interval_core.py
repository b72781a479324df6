"""
Aritmética de intervalos cerrados y relaciones de orden
Incluye la variante vectorizada (numpy) usada por el PSO de intervalos
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Sequence, Union

import numpy as np

from utils.errors import EmptySet, InvalidInterval, ShapeMismatch, ZeroInDivisor

Number = Union[int, float]


class SubtractionMode(str, Enum):
    """Regla de resta: Moore [x.lo−y.hi, x.hi−y.lo] o extremo a extremo normalizada"""

    MOORE = "moore"
    AS_PRINTED = "as_printed"


class ComparisonPolicy(str, Enum):
    OPTIMISTIC = "optimistic"
    PESSIMISTIC = "pessimistic"
    COMBINED = "combined"


class Verdict(str, Enum):
    GREATER = "greater"
    LESS = "less"
    EQUAL_OR_INCOMPARABLE = "equal_or_incomparable"


@dataclass(frozen=True)
class Interval:
    """
    Intervalo cerrado [lo, hi] con lo ≤ hi

    Args:
        lo: Extremo inferior
        hi: Extremo superior
    """

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise InvalidInterval(f"Intervalo con NaN: [{self.lo}, {self.hi}]")
        if lo > hi:
            raise InvalidInterval(f"Extremo inferior mayor que el superior: [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def normalized(cls, a: Number, b: Number) -> "Interval":
        """Construye el intervalo intercambiando extremos invertidos"""
        return cls(min(a, b), max(a, b))

    @classmethod
    def point(cls, value: Number) -> "Interval":
        return cls(value, value)

    @classmethod
    def from_center_radius(cls, center: Number, radius: Number) -> "Interval":
        if radius < 0:
            raise InvalidInterval(f"Radio negativo: {radius}")
        return cls(center - radius, center + radius)

    @classmethod
    def from_list(cls, values: Sequence[Number]) -> "Interval":
        """Deserializa el formato [lo, hi]"""
        if len(values) != 2:
            raise InvalidInterval(f"Se esperaban dos extremos, se recibió {list(values)}")
        return cls(values[0], values[1])

    @property
    def center(self) -> float:
        return (self.lo + self.hi) / 2

    @property
    def radius(self) -> float:
        return (self.hi - self.lo) / 2

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, other: "Interval") -> bool:
        """True si other ⊆ self"""
        return self.lo <= other.lo and other.hi <= self.hi

    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    def to_list(self) -> List[float]:
        return [self.lo, self.hi]

    def __add__(self, other: "Interval") -> "Interval":
        return add(self, other)

    def __sub__(self, other: "Interval") -> "Interval":
        return sub(self, other)

    def __mul__(self, other: Union["Interval", Number]) -> "Interval":
        if isinstance(other, Interval):
            return mul(self, other)
        return scale(other, self)

    def __rmul__(self, other: Number) -> "Interval":
        return scale(other, self)

    def __truediv__(self, other: "Interval") -> "Interval":
        return div(self, other)

    def __pow__(self, exponent: int) -> "Interval":
        return power(self, exponent)

    def __str__(self) -> str:
        return f"[{self.lo:.6f}, {self.hi:.6f}]"


@dataclass(frozen=True)
class IntervalOrdering:
    verdict: Verdict
    policy: ComparisonPolicy


def add(x: Interval, y: Interval) -> Interval:
    return Interval(x.lo + y.lo, x.hi + y.hi)


def sub(x: Interval, y: Interval, mode: SubtractionMode = SubtractionMode.MOORE) -> Interval:
    """
    Resta de intervalos

    Args:
        x: Minuendo
        y: Sustraendo
        mode: MOORE devuelve [x.lo−y.hi, x.hi−y.lo]; AS_PRINTED devuelve
            [x.lo−y.lo, x.hi−y.hi] con extremos reordenados si quedan invertidos

    Returns:
        Intervalo resultante
    """
    if SubtractionMode(mode) is SubtractionMode.MOORE:
        return Interval(x.lo - y.hi, x.hi - y.lo)
    return Interval.normalized(x.lo - y.lo, x.hi - y.hi)


def scale(factor: Number, x: Interval) -> Interval:
    if factor >= 0:
        return Interval(factor * x.lo, factor * x.hi)
    return Interval(factor * x.hi, factor * x.lo)


def mul(x: Interval, y: Interval) -> Interval:
    products = (x.lo * y.lo, x.lo * y.hi, x.hi * y.lo, x.hi * y.hi)
    return Interval(min(products), max(products))


def div(y: Interval, x: Interval) -> Interval:
    """
    División y / x, equivalente a y × [1/x.hi, 1/x.lo]

    Raises:
        ZeroInDivisor: si 0 ∈ x
    """
    if x.lo <= 0 <= x.hi:
        raise ZeroInDivisor(f"El divisor {x} contiene el cero")
    quotients = (y.lo / x.lo, y.lo / x.hi, y.hi / x.lo, y.hi / x.hi)
    return Interval(min(quotients), max(quotients))


def power(x: Interval, exponent: int) -> Interval:
    """
    Potencia entera no negativa con el caso de signo mixto para exponentes pares

    Args:
        x: Base
        exponent: Exponente N ≥ 0

    Returns:
        Intervalo x^N
    """
    if exponent < 0 or int(exponent) != exponent:
        raise InvalidInterval(f"Exponente inválido: {exponent}")
    n = int(exponent)
    if n == 0:
        return Interval(1.0, 1.0)
    if x.lo >= 0 or n % 2 == 1:
        return Interval(x.lo ** n, x.hi ** n)
    if x.hi <= 0:
        return Interval(x.hi ** n, x.lo ** n)
    return Interval(0.0, max(x.lo ** n, x.hi ** n))


def _optimistic(x: Interval, y: Interval) -> Verdict:
    if x.hi > y.hi:
        return Verdict.GREATER
    if x.hi < y.hi:
        return Verdict.LESS
    return Verdict.EQUAL_OR_INCOMPARABLE


def _pessimistic(x: Interval, y: Interval) -> Verdict:
    nested = x.contains(y) or y.contains(x)
    if not nested:
        if x.center > y.center:
            return Verdict.GREATER
        if x.center < y.center:
            return Verdict.LESS
        return Verdict.EQUAL_OR_INCOMPARABLE
    if x.center >= y.center and x.radius < y.radius:
        return Verdict.GREATER
    if y.center >= x.center and y.radius < x.radius:
        return Verdict.LESS
    return Verdict.EQUAL_OR_INCOMPARABLE


def compare_max(x: Interval, y: Interval,
                policy: ComparisonPolicy = ComparisonPolicy.COMBINED) -> IntervalOrdering:
    """
    Compara dos intervalos bajo la política de decisión indicada

    Optimista: decide por el extremo superior. Pesimista: por el centro en
    intervalos disjuntos o solapados; en contención gana el de centro mayor o
    igual y radio menor. Combinada: pesimista y, si no hay ganador estricto,
    optimista.
    """
    policy = ComparisonPolicy(policy)
    if x == y:
        return IntervalOrdering(Verdict.EQUAL_OR_INCOMPARABLE, policy)
    if policy is ComparisonPolicy.OPTIMISTIC:
        verdict = _optimistic(x, y)
    elif policy is ComparisonPolicy.PESSIMISTIC:
        verdict = _pessimistic(x, y)
    else:
        verdict = _pessimistic(x, y)
        if verdict is Verdict.EQUAL_OR_INCOMPARABLE:
            verdict = _optimistic(x, y)
    return IntervalOrdering(verdict, policy)


def is_greater(x: Interval, y: Interval,
               policy: ComparisonPolicy = ComparisonPolicy.COMBINED) -> bool:
    return compare_max(x, y, policy).verdict is Verdict.GREATER


def best_index(values: Iterable[Interval],
               policy: ComparisonPolicy = ComparisonPolicy.COMBINED) -> int:
    """
    Índice del intervalo maximal por plegado ordenado; los empates
    conservan la primera aparición

    Raises:
        EmptySet: si no hay intervalos
    """
    best = -1
    best_value = None
    for index, value in enumerate(values):
        if best_value is None or is_greater(value, best_value, policy):
            best, best_value = index, value
    if best < 0:
        raise EmptySet("No se puede elegir el máximo de un conjunto vacío")
    return best


@dataclass(frozen=True)
class IntervalVector:
    """
    Vector de intervalos almacenado como dos arreglos de extremos

    Args:
        lo: Extremos inferiores
        hi: Extremos superiores
    """

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float)
        hi = np.asarray(self.hi, dtype=float)
        if lo.shape != hi.shape:
            raise ShapeMismatch(f"Extremos con formas distintas: {lo.shape} vs {hi.shape}")
        if np.any(lo > hi):
            raise InvalidInterval("Vector con extremos invertidos")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def normalized(cls, a: np.ndarray, b: np.ndarray) -> "IntervalVector":
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        return cls(np.minimum(a, b), np.maximum(a, b))

    @classmethod
    def points(cls, values: np.ndarray) -> "IntervalVector":
        values = np.asarray(values, dtype=float)
        return cls(values.copy(), values.copy())

    @classmethod
    def zeros(cls, size: int) -> "IntervalVector":
        return cls(np.zeros(size), np.zeros(size))

    def __len__(self) -> int:
        return int(self.lo.size)

    def __getitem__(self, index: int) -> Interval:
        return Interval(self.lo[index], self.hi[index])

    @property
    def centers(self) -> np.ndarray:
        return (self.lo + self.hi) / 2

    @property
    def widths(self) -> np.ndarray:
        return self.hi - self.lo

    def add(self, other: "IntervalVector") -> "IntervalVector":
        return IntervalVector(self.lo + other.lo, self.hi + other.hi)

    def sub(self, other: "IntervalVector",
            mode: SubtractionMode = SubtractionMode.MOORE) -> "IntervalVector":
        if SubtractionMode(mode) is SubtractionMode.MOORE:
            return IntervalVector(self.lo - other.hi, self.hi - other.lo)
        return IntervalVector.normalized(self.lo - other.lo, self.hi - other.hi)

    def scale(self, factor: float) -> "IntervalVector":
        if factor >= 0:
            return IntervalVector(factor * self.lo, factor * self.hi)
        return IntervalVector(factor * self.hi, factor * self.lo)

    def clamp_magnitude(self, limit: float) -> "IntervalVector":
        """Recorta cada extremo a [−limit, limit]"""
        return IntervalVector(np.clip(self.lo, -limit, limit), np.clip(self.hi, -limit, limit))

    def clamp_to_box(self, lower: float, upper: float) -> "IntervalVector":
        """Recorta cada componente a la caja [lower, upper]"""
        return IntervalVector(np.clip(self.lo, lower, upper), np.clip(self.hi, lower, upper))

    def cap_width(self, limit: float) -> "IntervalVector":
        """Encoge alrededor del centro los componentes de ancho mayor a limit"""
        half = np.minimum(self.widths, limit) / 2
        centers = self.centers
        return IntervalVector(centers - half, centers + half)
