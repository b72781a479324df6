"""
Carga de instancias, conjuntos de intervalos, asignaciones y parámetros
Los archivos son JSON (o YAML compatible) validados con esquemas pydantic
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from analysis.interval_core import Interval
from config.reference_data import INSTANCE_PRESETS, INTERVAL_SETS, set_name_from_index
from optimization.rap_problem import Allocation, CostMode, Objective, RapInstance, place_copies
from utils.config import get_config
from utils.errors import AllocationParseError, DomainError, InstanceParseError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class InstanceFile(BaseModel):
    """Esquema del archivo de instancia"""

    model_config = ConfigDict(extra="forbid")

    name: str = "instance"
    m: Optional[int] = Field(None, ge=1)
    n: Optional[int] = Field(None, ge=1)
    readiness: List[float]
    wakeup: List[List[float]]
    cost: List[List[int]]
    budget: int = Field(..., gt=0)
    r_intervals: List[Tuple[float, float]] = []
    function_names: List[str] = []
    unsupported: Optional[List[List[int]]] = None
    cost_mode: CostMode = CostMode.PER_OIC_MAX
    objective: Objective = Objective.ALL_READY

    @model_validator(mode="after")
    def _check_dimensions(self) -> "InstanceFile":
        rows = len(self.wakeup)
        cols = len(self.wakeup[0]) if rows else 0
        if self.m is not None and self.m != rows:
            raise ValueError(f"m={self.m} pero wakeup tiene {rows} filas")
        if self.n is not None and self.n != cols:
            raise ValueError(f"n={self.n} pero wakeup tiene {cols} columnas")
        if any(len(row) != cols for row in self.wakeup + self.cost):
            raise ValueError("Las filas de wakeup y cost deben tener el mismo largo")
        return self

    def to_instance(self, r_set: Optional[Sequence[Interval]] = None) -> RapInstance:
        intervals = tuple(r_set) if r_set is not None else tuple(Interval(lo, hi) for lo, hi in self.r_intervals)
        return RapInstance(
            name=self.name,
            readiness=np.array(self.readiness),
            wakeup=np.array(self.wakeup),
            cost=np.array(self.cost),
            budget=self.budget,
            r_set=intervals,
            function_names=tuple(self.function_names),
            unsupported=None if self.unsupported is None else np.array(self.unsupported, dtype=bool),
            cost_mode=self.cost_mode,
            objective=self.objective,
        )


def _read_structured(path: Path, error: type) -> Any:
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            if path.suffix.lower() == ".json":
                return json.load(handle)
            return yaml.safe_load(handle)
    except FileNotFoundError:
        raise error(f"Archivo no encontrado: {path}")
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise error(f"Archivo mal formado {path}: {exc}")


def resolve_instance_path(name_or_path: PathLike) -> Path:
    """Ruta directa o preset ('example_one', 'example_two') bajo data/instances"""
    path = Path(name_or_path)
    if path.exists():
        return path
    preset = INSTANCE_PRESETS.get(str(name_or_path))
    if preset:
        return get_config().get_data_dir() / "instances" / preset
    return path


def load_instance(name_or_path: PathLike, r_set: Optional[Sequence[Interval]] = None,
                  cost_mode: Optional[str] = None, objective: Optional[str] = None) -> RapInstance:
    """
    Carga una instancia del RAP

    Args:
        name_or_path: Ruta al archivo o nombre de preset
        r_set: Conjunto de intervalos que reemplaza al del archivo
        cost_mode: Modo de costo que reemplaza al del archivo
        objective: Objetivo que reemplaza al del archivo

    Returns:
        RapInstance validada

    Raises:
        InstanceParseError: si el archivo no existe o no cumple el esquema
    """
    path = resolve_instance_path(name_or_path)
    raw = _read_structured(path, InstanceParseError)
    if not isinstance(raw, dict):
        raise InstanceParseError(f"{path}: se esperaba un objeto")
    if cost_mode is not None:
        raw['cost_mode'] = cost_mode
    if objective is not None:
        raw['objective'] = objective
    try:
        schema = InstanceFile(**raw)
    except ValidationError as exc:
        raise InstanceParseError(f"{path}: {exc}")
    try:
        instance = schema.to_instance(r_set)
    except DomainError as exc:
        raise InstanceParseError(f"{path}: {exc}")
    logger.info(f"✅ Instancia {instance.name} cargada: {instance.m} OICs × {instance.n} funciones, "
                f"C={instance.budget}")
    return instance


def load_interval_sets(path: Optional[PathLike] = None) -> Dict[str, Tuple[Interval, ...]]:
    """
    Carga los conjuntos de intervalos {nombre: [[lo, hi], ...]}

    Sin archivo disponible se usan los conjuntos de referencia.
    """
    path = Path(path) if path is not None else get_config().get_interval_sets_path()
    if path.exists():
        raw = _read_structured(path, InstanceParseError)
    else:
        logger.warning(f"⚠️  {path} no existe, se usan los conjuntos de referencia")
        raw = INTERVAL_SETS
    try:
        return {name: tuple(Interval.from_list(pair) for pair in values) for name, values in raw.items()}
    except (DomainError, TypeError, ValueError) as exc:
        raise InstanceParseError(f"Conjunto de intervalos inválido en {path}: {exc}")


def resolve_interval_set(selector: Union[str, int], path: Optional[PathLike] = None) -> Tuple[str, Tuple[Interval, ...]]:
    """
    Selecciona un conjunto por índice (1..5) o por nombre ('SET3')

    Returns:
        (nombre, intervalos)
    """
    sets = load_interval_sets(path)
    text = str(selector).strip().upper()
    try:
        name = set_name_from_index(int(text)) if text.isdigit() else text
    except KeyError as exc:
        raise InstanceParseError(str(exc))
    if name not in sets:
        raise InstanceParseError(f"Conjunto de intervalos desconocido: {selector}")
    return name, sets[name]


def parse_interval(text: str) -> Interval:
    """'[0.89,0.95]' o '0.89,0.95' → Interval"""
    cleaned = text.strip().strip("[]()")
    try:
        values = [float(part) for part in cleaned.split(",")]
        return Interval.from_list(values)
    except (ValueError, DomainError) as exc:
        raise InstanceParseError(f"Intervalo inválido '{text}': {exc}")


def _bits(token: str) -> List[int]:
    if set(token) - {"0", "1"}:
        raise AllocationParseError(f"Grupo de bits inválido: '{token}'")
    return [int(char) for char in token]


def parse_allocation_text(text: str, inst: RapInstance, r_point: Optional[float] = None) -> Allocation:
    """
    Formato publicado: grupos de bits de X por OIC, '/', fila U

    Acepta también los m·n bits separados por espacios. A se construye con
    place_copies.

    Args:
        text: Texto como '101000 000010 101101 / 2 2 2 3 3 3'
        inst: Instancia del RAP
        r_point: Confiabilidad de misión para ordenar las copias

    Returns:
        Asignación con X y A
    """
    if "/" not in text:
        raise AllocationParseError("Falta el separador '/' entre X y U")
    x_part, u_part = text.split("/", 1)
    tokens = x_part.split()
    if len(tokens) == inst.m * inst.n and all(len(token) == 1 for token in tokens):
        tokens = ["".join(tokens[i * inst.n:(i + 1) * inst.n]) for i in range(inst.m)]
    if len(tokens) != inst.m or any(len(token) != inst.n for token in tokens):
        raise AllocationParseError(f"X debe tener {inst.m} grupos de {inst.n} bits")
    x = np.array([_bits(token) for token in tokens], dtype=bool)
    try:
        u = [int(value) for value in u_part.split()]
    except ValueError:
        raise AllocationParseError(f"Fila U inválida: '{u_part.strip()}'")
    if len(u) != inst.n or min(u) < 0:
        raise AllocationParseError(f"U debe tener {inst.n} enteros no negativos")
    try:
        return place_copies(inst, x, u, r_point)
    except DomainError as exc:
        raise AllocationParseError(str(exc))


def load_allocation(path: PathLike, inst: RapInstance, r_point: Optional[float] = None) -> Allocation:
    """
    Carga una asignación desde texto publicado o JSON ({x, a} o {x, u})

    Raises:
        AllocationParseError: si el archivo no existe o es inválido
    """
    path = Path(path)
    if path.suffix.lower() in (".json", ".yaml", ".yml"):
        raw = _read_structured(path, AllocationParseError)
        if not isinstance(raw, dict) or 'x' not in raw:
            raise AllocationParseError(f"{path}: se esperaba un objeto con 'x' y 'a' o 'u'")
        try:
            if 'a' in raw:
                alloc = Allocation(np.array(raw['x']), np.array(raw['a']))
            else:
                alloc = place_copies(inst, np.array(raw['x']), raw.get('u', []), r_point)
        except (DomainError, ValueError) as exc:
            raise AllocationParseError(f"{path}: {exc}")
        if alloc.shape != (inst.m, inst.n):
            raise AllocationParseError(f"{path}: asignación {alloc.shape} para instancia {inst.m}×{inst.n}")
        return alloc
    try:
        text = path.read_text(encoding='utf-8')
    except FileNotFoundError:
        raise AllocationParseError(f"Archivo no encontrado: {path}")
    return parse_allocation_text(text.strip(), inst, r_point)


def load_params(path: Optional[PathLike]) -> Dict[str, Any]:
    """Parámetros de solver desde YAML/JSON (vacío si no hay archivo)"""
    if path is None:
        return {}
    raw = _read_structured(Path(path), InstanceParseError)
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise InstanceParseError(f"{path}: los parámetros deben ser un objeto")
    return raw
