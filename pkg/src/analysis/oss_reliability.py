"""
Confiabilidad One-Shot-System de un sistema multinúcleo con OICs en espera tibia
Incluye la enumeración general de subconjuntos listos, los casos especiales,
la confiabilidad por función, el arranque óptimo y el modelo Erlang con MTTF
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, stats

from analysis.interval_core import Interval
from utils.errors import (
    EnumerationTooLarge,
    InvalidConfig,
    NegativeTime,
    NoCandidate,
    NonConvergence,
    NonIdenticalWakeup,
    NonUniformReadiness,
    ShapeMismatch,
)

logger = logging.getLogger(__name__)

MAX_ENUMERATED_OICS = 20
SUBSET_CHUNK = 1 << 14


def _as_matrix(values, name: str, dtype=float) -> np.ndarray:
    matrix = np.asarray(values, dtype=dtype)
    if matrix.ndim != 2:
        raise ShapeMismatch(f"{name} debe ser una matriz m×n, forma recibida {matrix.shape}")
    return matrix


def _check_probabilities(values: np.ndarray, name: str):
    if np.any(~np.isfinite(values)) or np.any(values < 0) or np.any(values > 1):
        raise InvalidConfig(f"{name} debe contener probabilidades en [0, 1]")


@dataclass(frozen=True, eq=False)
class OssConfig:
    """
    Descripción completa del sistema: m OICs candidatas, n funciones

    Args:
        rd: Probabilidad de disponibilidad (readiness) de cada OIC, largo m
        p: Probabilidad de activación (wakeup) p_ij, m×n
        a: Matriz binaria de disponibilidad de funciones a_ij
        x: Matriz binaria de arranque previo x_ij
        r: Confiabilidad de misión como intervalo
        cost: Latencia de ejecución C_ij en ciclos (opcional)
        budget: Presupuesto de ciclos C (opcional)
        cores: Número L de núcleos convencionales activos
        selected: Índices de las OICs seleccionadas Ψ₀ (por defecto todas)
        r_cell: Factor opcional por celda que multiplica a r
    """

    rd: np.ndarray
    p: np.ndarray
    a: np.ndarray
    x: np.ndarray
    r: Interval = field(default_factory=lambda: Interval(1.0, 1.0))
    cost: Optional[np.ndarray] = None
    budget: Optional[float] = None
    cores: int = 1
    selected: Optional[Tuple[int, ...]] = None
    r_cell: Optional[np.ndarray] = None

    def __post_init__(self):
        rd = np.asarray(self.rd, dtype=float).reshape(-1)
        p = _as_matrix(self.p, "p")
        a = _as_matrix(self.a, "a").astype(bool)
        x = _as_matrix(self.x, "x").astype(bool)
        m, n = p.shape
        if rd.shape != (m,) or a.shape != (m, n) or x.shape != (m, n):
            raise ShapeMismatch(
                f"Dimensiones inconsistentes: rd{rd.shape} p{p.shape} a{a.shape} x{x.shape}")
        _check_probabilities(rd, "rd")
        _check_probabilities(p, "p")
        if np.any(x & ~a):
            raise InvalidConfig("Una función con arranque previo debe estar disponible (x_ij ⇒ a_ij)")
        r = self.r if isinstance(self.r, Interval) else Interval.point(float(self.r))
        if r.lo < 0 or r.hi > 1:
            raise InvalidConfig(f"La confiabilidad de misión {r} debe estar en [0, 1]")
        selected = tuple(range(m)) if self.selected is None else tuple(int(i) for i in self.selected)
        if len(set(selected)) != len(selected) or any(i < 0 or i >= m for i in selected):
            raise InvalidConfig(f"Selección de OICs inválida: {selected}")
        cost = None if self.cost is None else _as_matrix(self.cost, "cost")
        if cost is not None and cost.shape != (m, n):
            raise ShapeMismatch(f"cost debe ser {m}×{n}, forma recibida {cost.shape}")
        r_cell = None if self.r_cell is None else _as_matrix(self.r_cell, "r_cell")
        if r_cell is not None:
            if r_cell.shape != (m, n):
                raise ShapeMismatch(f"r_cell debe ser {m}×{n}, forma recibida {r_cell.shape}")
            _check_probabilities(r_cell, "r_cell")
        if self.cores < 1:
            raise InvalidConfig(f"Se requiere al menos un núcleo convencional, recibido {self.cores}")

        object.__setattr__(self, "rd", rd)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "selected", selected)
        object.__setattr__(self, "cost", cost)
        object.__setattr__(self, "r_cell", r_cell)

    @property
    def m(self) -> int:
        return int(self.p.shape[0])

    @property
    def n(self) -> int:
        return int(self.p.shape[1])

    @property
    def w(self) -> int:
        return len(self.selected)

    def with_allocation(self, x: np.ndarray, a: np.ndarray) -> "OssConfig":
        return replace(self, x=x, a=a)

    def with_r(self, r: Interval) -> "OssConfig":
        return replace(self, r=r)


@dataclass(frozen=True, eq=False)
class EffectiveWakeup:
    """E_ij = 1 si la función tiene arranque previo, p_ij en otro caso"""

    E: np.ndarray


@dataclass(frozen=True, eq=False)
class ErlangParams:
    """
    Parámetros del modelo Erlang de los núcleos convencionales

    Args:
        rates: Tasas de falla λ_i (1/hora), una por núcleo
        beta: Parámetro de forma (unidad activa más β−1 respaldos)
        element_scale: Fallas/hora por elemento lógico (si se derivó de conteos)
        elements: Conteo de elementos lógicos por núcleo (si se derivó de conteos)
        shared_spares: Si es True los β−1 respaldos forman un único fondo común
    """

    rates: np.ndarray
    beta: int = 1
    element_scale: Optional[float] = None
    elements: Optional[np.ndarray] = None
    shared_spares: bool = False

    def __post_init__(self):
        rates = np.asarray(self.rates, dtype=float).reshape(-1)
        if rates.size == 0 or np.any(~(rates > 0)):
            raise InvalidConfig("Las tasas de falla deben ser positivas")
        if int(self.beta) != self.beta or self.beta < 1:
            raise InvalidConfig(f"β debe ser un entero ≥ 1, recibido {self.beta}")
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "beta", int(self.beta))

    @classmethod
    def from_elements(cls, elements: Sequence[float], element_scale: float,
                      beta: int = 1, shared_spares: bool = False) -> "ErlangParams":
        """
        Deriva λ_i = element_scale × elements_i

        Args:
            elements: Elementos lógicos por núcleo
            element_scale: Fallas/hora por elemento lógico
            beta: Parámetro de forma
            shared_spares: Fondo común de respaldos

        Returns:
            Parámetros Erlang
        """
        counts = np.asarray(elements, dtype=float).reshape(-1)
        if element_scale is None or element_scale <= 0:
            raise InvalidConfig("element_scale debe ser positivo y es obligatorio")
        return cls(rates=counts * element_scale, beta=beta, element_scale=element_scale,
                   elements=counts, shared_spares=shared_spares)

    @property
    def cores(self) -> int:
        return int(self.rates.size)


def effective_wakeup(x: np.ndarray, p: np.ndarray) -> EffectiveWakeup:
    x = np.asarray(x)
    p = np.asarray(p, dtype=float)
    if x.shape != p.shape:
        raise ShapeMismatch(f"x{x.shape} y p{p.shape} deben tener la misma forma")
    return EffectiveWakeup(E=(1.0 - p) * x.astype(float) + p)


def _resolve_point(cfg: OssConfig, r_point: Optional[float]) -> float:
    value = cfg.r.center if r_point is None else float(r_point)
    if not 0.0 <= value <= 1.0:
        raise InvalidConfig(f"r_point={value} fuera de [0, 1]")
    return value


def _attempt_failures(cfg: OssConfig, r_point: float) -> np.ndarray:
    """Matriz w×n de (1 − r·E_ij)^{a_ij} sobre las OICs seleccionadas"""
    sel = list(cfg.selected)
    E = effective_wakeup(cfg.x, cfg.p).E[sel]
    success = r_point * E
    if cfg.r_cell is not None:
        success = success * cfg.r_cell[sel]
    return np.where(cfg.a[sel], 1.0 - success, 1.0)


def reliability_all_ready(cfg: OssConfig, r_point: Optional[float] = None) -> float:
    """
    Término con todas las OICs seleccionadas listas

    Args:
        cfg: Configuración del sistema
        r_point: Confiabilidad de misión puntual (por defecto el centro de cfg.r)

    Returns:
        (∏ rd_u) · ∏_j [1 − ∏_i (1 − r·E_ij)^{a_ij}]
    """
    r_point = _resolve_point(cfg, r_point)
    failures = _attempt_failures(cfg, r_point)
    functions = 1.0 - np.prod(failures, axis=0)
    return float(np.prod(cfg.rd[list(cfg.selected)]) * np.prod(functions))


def _ready_masks(w: int, include_empty: bool = False) -> Iterator[np.ndarray]:
    """Máscaras booleanas de subconjuntos listos, en bloques"""
    start = 0 if include_empty else 1
    shifts = np.arange(w)
    for block in range(start, 1 << w, SUBSET_CHUNK):
        index = np.arange(block, min(block + SUBSET_CHUNK, 1 << w))
        yield ((index[:, None] >> shifts) & 1).astype(bool)


def _guard_enumeration(cfg: OssConfig):
    if cfg.w > MAX_ENUMERATED_OICS:
        raise EnumerationTooLarge(
            f"w={cfg.w} OICs seleccionadas excede el límite de enumeración ({MAX_ENUMERATED_OICS})")


def _function_success(masks: np.ndarray, failures: np.ndarray) -> np.ndarray:
    """∏_j [1 − ∏_{i listo} q_ij] para cada máscara"""
    per_function = np.prod(np.where(masks[:, :, None], failures[None, :, :], 1.0), axis=1)
    return np.prod(1.0 - per_function, axis=1)


def readiness_weights(rd: Sequence[float]) -> np.ndarray:
    """
    Peso de cada uno de los 2^w subconjuntos listos (incluye el vacío)

    Args:
        rd: Probabilidades de disponibilidad

    Returns:
        Arreglo de largo 2^w; el bit i del índice indica que la OIC i está lista
    """
    rd = np.asarray(rd, dtype=float).reshape(-1)
    if rd.size > MAX_ENUMERATED_OICS:
        raise EnumerationTooLarge(f"w={rd.size} excede el límite de enumeración")
    weights = [np.prod(np.where(masks, rd, 1.0 - rd), axis=1)
               for masks in _ready_masks(rd.size, include_empty=True)]
    return np.concatenate(weights)


def system_reliability(cfg: OssConfig, r_point: Optional[float] = None) -> float:
    """
    Confiabilidad del sistema sumando sobre todos los subconjuntos listos no vacíos

    Args:
        cfg: Configuración del sistema
        r_point: Confiabilidad de misión puntual (por defecto el centro de cfg.r)

    Returns:
        Probabilidad de que todas las funciones se ejecuten
    """
    _guard_enumeration(cfg)
    r_point = _resolve_point(cfg, r_point)
    rd = cfg.rd[list(cfg.selected)]
    failures = _attempt_failures(cfg, r_point)
    total = 0.0
    for masks in _ready_masks(cfg.w):
        weights = np.prod(np.where(masks, rd, 1.0 - rd), axis=1)
        total += float(np.dot(weights, _function_success(masks, failures)))
    return min(max(total, 0.0), 1.0)


def interval_system_reliability(cfg: OssConfig) -> Interval:
    """Evalúa la fórmula general en ambos extremos de cfg.r"""
    return Interval.normalized(system_reliability(cfg, cfg.r.lo), system_reliability(cfg, cfg.r.hi))


def interval_reliability_all_ready(cfg: OssConfig) -> Interval:
    """Evalúa el término de todas las OICs listas en ambos extremos de cfg.r"""
    return Interval.normalized(reliability_all_ready(cfg, cfg.r.lo), reliability_all_ready(cfg, cfg.r.hi))


def special_case_identical_readiness(cfg: OssConfig, rd: float, r_point: Optional[float] = None) -> float:
    """
    Forma cerrada con readiness idéntica: pesos rd^{w−k}(1−rd)^k por tamaño del
    subconjunto listo

    Raises:
        NonUniformReadiness: si alguna OIC seleccionada tiene otro readiness
    """
    _guard_enumeration(cfg)
    selected = cfg.rd[list(cfg.selected)]
    if np.any(np.abs(selected - rd) > 1e-15):
        raise NonUniformReadiness(f"Readiness no uniforme: {selected.tolist()} vs {rd}")
    r_point = _resolve_point(cfg, r_point)
    failures = _attempt_failures(cfg, r_point)
    total = 0.0
    for masks in _ready_masks(cfg.w):
        ready = masks.sum(axis=1)
        weights = rd ** ready * (1.0 - rd) ** (cfg.w - ready)
        total += float(np.dot(weights, _function_success(masks, failures)))
    return total


def special_case_series(rd: Sequence[float], r_point: float, n: int) -> float:
    """Sistema serie (X = A = identidad): ∏_j rd_j·r"""
    rd = np.asarray(rd, dtype=float).reshape(-1)
    if rd.size != n:
        raise InvalidConfig(f"El caso serie requiere m = n, recibido m={rd.size}, n={n}")
    return float(np.prod(rd * r_point))


def special_case_parallel(rd: Sequence[float]) -> float:
    """Sistema paralelo (a = p = 1, r = 1): 1 − ∏(1 − rd_v)"""
    rd = np.asarray(rd, dtype=float).reshape(-1)
    return float(1.0 - np.prod(1.0 - rd))


def special_case_identical_components(cfg: OssConfig, P: Sequence[float],
                                      r_point: Optional[float] = None) -> float:
    """
    OICs idénticas (p_ij = P_j): cada subconjunto listo se divide en las OICs
    sin arranque previo, que fallan con (1 − r·P_j), y las arrancadas, que
    fallan con (1 − r)

    Raises:
        NonIdenticalWakeup: si alguna fila de p difiere de P
    """
    _guard_enumeration(cfg)
    P = np.asarray(P, dtype=float).reshape(-1)
    sel = list(cfg.selected)
    if P.shape != (cfg.n,) or np.any(np.abs(cfg.p[sel] - P[None, :]) > 1e-15):
        raise NonIdenticalWakeup("Las OICs seleccionadas no comparten la misma probabilidad de activación")
    if cfg.r_cell is not None:
        raise InvalidConfig("El caso de componentes idénticos no admite r por celda")
    r_point = _resolve_point(cfg, r_point)
    rd = cfg.rd[sel]
    plain = (cfg.a[sel] & ~cfg.x[sel]).astype(float)
    started = (cfg.a[sel] & cfg.x[sel]).astype(float)
    total = 0.0
    for masks in _ready_masks(cfg.w):
        weights = np.prod(np.where(masks, rd, 1.0 - rd), axis=1)
        m_float = masks.astype(float)
        fail = (1.0 - r_point * P)[None, :] ** (m_float @ plain) * (1.0 - r_point) ** (m_float @ started)
        total += float(np.dot(weights, np.prod(1.0 - fail, axis=1)))
    return total


def function_reliabilities(rd: np.ndarray, E: np.ndarray, a: np.ndarray, r_point: float) -> np.ndarray:
    """
    Confiabilidad de todas las funciones a la vez (forma matricial de
    function_reliability, sin selección ni r por celda)

    Args:
        rd: Readiness por OIC
        E: Probabilidad efectiva de activación m×n (E = p para la ganancia sin arranque)
        a: Disponibilidad m×n
        r_point: Confiabilidad de misión puntual

    Returns:
        Arreglo de largo n; 0 para funciones sin copias
    """
    a = np.asarray(a, dtype=bool)
    terms = np.where(a, 1.0 - np.asarray(rd, dtype=float)[:, None] * r_point * E, 1.0)
    return np.where(a.any(axis=0), 1.0 - np.prod(terms, axis=0), 0.0)


def _function_value(rd: np.ndarray, available: np.ndarray, success: np.ndarray) -> float:
    terms = np.where(available, 1.0 - rd * success, 1.0)
    if not np.any(available):
        return 0.0
    return float(1.0 - np.prod(terms))


def function_reliability(cfg: OssConfig, j: int, use_startup: bool = True,
                         r_point: Optional[float] = None) -> float:
    """
    Confiabilidad de la función j sobre las OICs que la tienen disponible

    Args:
        cfg: Configuración del sistema
        j: Índice de la función
        use_startup: Si es False se usa E = p (ganancia sin arranque previo)
        r_point: Confiabilidad de misión puntual (por defecto el centro de cfg.r)

    Returns:
        1 − ∏_{i∈I_j} [1 − rd_i·r·E_ij], o 0 si ninguna OIC tiene la función
    """
    if not 0 <= j < cfg.n:
        raise InvalidConfig(f"Función {j} fuera de rango (n={cfg.n})")
    r_point = _resolve_point(cfg, r_point)
    sel = list(cfg.selected)
    E = effective_wakeup(cfg.x, cfg.p).E if use_startup else cfg.p
    success = r_point * E[sel, j]
    if cfg.r_cell is not None:
        success = success * cfg.r_cell[sel, j]
    return _function_value(cfg.rd[sel], cfg.a[sel, j], success)


def best_startup_for_function(cfg: OssConfig, j: int, r_point: Optional[float] = None) -> int:
    """
    OIC cuyo arranque previo maximiza la confiabilidad de la función j

    Args:
        cfg: Configuración del sistema
        j: Índice de la función
        r_point: Confiabilidad de misión puntual (por defecto el centro de cfg.r)

    Returns:
        Índice de la OIC ganadora (empates: menor índice)

    Raises:
        NoCandidate: si ninguna OIC seleccionada tiene la función disponible
    """
    r_point = _resolve_point(cfg, r_point)
    sel = np.array(cfg.selected)
    available = cfg.a[sel, j]
    if not np.any(available):
        raise NoCandidate(f"La función {j} no está disponible en ninguna OIC seleccionada")
    scale = cfg.r_cell[sel, j] if cfg.r_cell is not None else 1.0
    best, best_value = None, -np.inf
    for position in np.flatnonzero(available):
        E = cfg.p[sel, j].copy()
        E[position] = 1.0
        value = _function_value(cfg.rd[sel], available, r_point * E * scale)
        if value > best_value:
            best, best_value = int(sel[position]), value
    return best


def erlang_reliability(t: float, params: ErlangParams) -> float:
    """
    Confiabilidad Erlang de los núcleos convencionales en el instante t

    Cada núcleo sobrevive mientras ocurran a lo sumo β−1 fallas (suma de
    Poisson truncada); con varios núcleos se multiplica por núcleo, o se usa
    un único fondo de β−1 respaldos si shared_spares es True.

    Raises:
        NegativeTime: si t < 0
    """
    if t < 0:
        raise NegativeTime(f"El tiempo debe ser no negativo, recibido {t}")
    if t == 0:
        return 1.0
    if params.shared_spares:
        return float(stats.poisson.cdf(params.beta - 1, float(np.sum(params.rates)) * t))
    return float(np.prod(stats.poisson.cdf(params.beta - 1, params.rates * t)))


def time_dependent_system_reliability(cfg: OssConfig, params: ErlangParams, t: float) -> float:
    return system_reliability(cfg, erlang_reliability(t, params))


def mttf(cfg: OssConfig, params: ErlangParams, rel_tol: float = 1e-8) -> float:
    """
    Integral en el tiempo de la confiabilidad dependiente del tiempo

    El límite superior se duplica hasta que el integrando cae bajo 1e−12 y
    luego se integra con cuadratura adaptativa.

    Raises:
        NonConvergence: si el integrando no decae o la cuadratura no converge
    """
    def integrand(t: float) -> float:
        return time_dependent_system_reliability(cfg, params, t)

    t_cut = 10.0 * params.beta / float(np.min(params.rates))
    for _ in range(64):
        if integrand(t_cut) < 1e-12:
            break
        t_cut *= 2.0
    else:
        raise NonConvergence("La confiabilidad no decae a cero: MTTF no acotado")

    result = integrate.quad(integrand, 0.0, t_cut, epsabs=0.0, epsrel=rel_tol,
                            limit=500, full_output=1)
    value, abserr = result[0], result[1]
    if len(result) > 3:
        raise NonConvergence(f"Cuadratura sin convergencia: {result[3]}")
    logger.debug(f"MTTF={value:.6f} h (error estimado {abserr:.2e}, T_cut={t_cut:.1f})")
    return float(value)


def single_core_single_oic(cfg: OssConfig, r_point: Optional[float] = None) -> float:
    """Un núcleo convencional y una OIC: rd₁·∏_j [1 − (1 − r·E_1j)^{a_1j}]"""
    if cfg.m != 1 or cfg.w != 1:
        raise InvalidConfig(f"Se requiere m = w = 1, recibido m={cfg.m}, w={cfg.w}")
    r_point = _resolve_point(cfg, r_point)
    failures = _attempt_failures(cfg, r_point)[0]
    return float(cfg.rd[0] * np.prod(1.0 - failures))
