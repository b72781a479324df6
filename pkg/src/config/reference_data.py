"""
Datos de referencia normalizados
Conjuntos de intervalos de confiabilidad de misión, presets de instancias
y conteos de elementos lógicos para la variante Erlang
"""

from typing import Dict, List, Tuple

# Conjuntos de intervalos [lower, upper] por tipo
INTERVAL_SETS: Dict[str, List[Tuple[float, float]]] = {
    # Intervalos disjuntos
    "SET1": [(0.68, 0.72), (0.73, 0.75), (0.78, 0.81), (0.80, 0.88), (0.89, 0.95)],
    # Disjuntos y parcialmente solapados
    "SET2": [(0.65, 0.70), (0.71, 0.73), (0.80, 0.88), (0.82, 0.87), (0.90, 0.92)],
    "SET3": [(0.60, 0.67), (0.72, 0.78), (0.78, 0.83), (0.80, 0.90), (0.87, 0.956)],
    "SET4": [(0.64, 0.65), (0.72, 0.74), (0.80, 0.88), (0.83, 0.85), (0.90, 0.95)],
    # Contenidos, disjuntos y solapados
    "SET5": [(0.63, 0.66), (0.64, 0.68), (0.65, 0.70), (0.65, 0.70), (0.73, 0.74),
             (0.75, 0.79), (0.76, 0.86), (0.75, 0.80), (0.77, 0.80), (0.75, 0.81),
             (0.78, 0.84), (0.80, 0.87), (0.88, 0.92), (0.89, 0.90), (0.91, 0.96)],
}

INTERVAL_SET_TYPES = {
    "SET1": "Disjuntos",
    "SET2": "Disjuntos y parcialmente solapados",
    "SET3": "Disjuntos y parcialmente solapados",
    "SET4": "Disjuntos y parcialmente solapados",
    "SET5": "Contenidos, disjuntos y parcialmente solapados",
}

# Instancias incluidas en data/instances
INSTANCE_PRESETS = {
    "example_one": "example_one.json",   # 3 OICs, 6 funciones, C = 50
    "example_two": "example_two.json",   # 6 OICs, 10 funciones, C = 3000
}

# Asignaciones publicadas (formato grupos de X / U)
PUBLISHED_ALLOCATIONS = {
    ("example_one", "SET1"): {
        "file": "example_one_set1.txt",
        "reliability": (0.969002, 0.970178),
        "cost": 44,
    },
    ("example_two", "SET1"): {
        "file": "example_two_set1.txt",
        "reliability": (0.989966, 0.989997),
        "cost": 2500,
    },
}

# Elementos lógicos por componente
LOGICAL_ELEMENTS = {
    "oic": 530,        # OIC
    "mips_core": 19988,  # núcleo MIPS
    "mcs_oic": 20518,  # MCS-OIC (núcleo + OIC)
}

# Métricas de paridad esperadas
RELIABILITY_CEILING_EXAMPLE_ONE = 0.99 ** 3


def interval_set_names() -> List[str]:
    """Nombres de los conjuntos disponibles"""
    return list(INTERVAL_SETS.keys())


def set_name_from_index(index: int) -> str:
    """
    Convierte el índice 1..5 de la CLI en el nombre del conjunto

    Args:
        index: Índice base 1

    Returns:
        Nombre tipo 'SET1'
    """
    name = f"SET{int(index)}"
    if name not in INTERVAL_SETS:
        raise KeyError(f"Conjunto de intervalos desconocido: {index}")
    return name


def get_published_allocation(instance: str, set_name: str) -> Dict:
    """Entrada publicada para (instancia, conjunto) o diccionario vacío"""
    return PUBLISHED_ALLOCATIONS.get((instance, set_name), {})
