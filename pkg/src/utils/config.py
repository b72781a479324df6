"""
Módulo de configuración para el toolkit de asignación de redundancia
Maneja la carga de configuraciones desde archivos YAML y variables de entorno
"""

import yaml
import os
from typing import Dict, Any, List
import logging
from pathlib import Path

from config.reference_data import LOGICAL_ELEMENTS
from utils.errors import InvalidConfig

logger = logging.getLogger(__name__)

PROJECT_ROOT = Path(__file__).parent.parent.parent


class ConfigManager:
    """Gestor de configuración para el proyecto"""

    def __init__(self, config_path: str = None):
        """
        Inicializa el gestor de configuración

        Args:
            config_path: Ruta al archivo de configuración
        """
        if config_path is None:
            config_path = os.getenv("RAP_CONFIG") or PROJECT_ROOT / "config" / "config.yaml"

        self.config_path = Path(config_path)
        self.config = self._load_config()

    def _load_config(self) -> Dict[str, Any]:
        """
        Carga la configuración desde el archivo YAML

        Returns:
            Diccionario con la configuración
        """
        try:
            if not self.config_path.exists():
                logger.error(f"Archivo de configuración no encontrado: {self.config_path}")
                return {}

            with open(self.config_path, 'r', encoding='utf-8') as file:
                config = yaml.safe_load(file) or {}

            config = self._replace_env_variables(config)

            logger.debug(f"Configuración cargada desde: {self.config_path}")
            return config

        except Exception as e:
            logger.error(f"Error cargando configuración: {e}")
            return {}

    def _replace_env_variables(self, obj: Any) -> Any:
        """
        Reemplaza variables de entorno en la configuración
        Formato: ${VARIABLE_NAME} o ${VARIABLE_NAME:default_value}

        Args:
            obj: Objeto a procesar

        Returns:
            Objeto con variables de entorno reemplazadas
        """
        if isinstance(obj, dict):
            return {key: self._replace_env_variables(value) for key, value in obj.items()}
        elif isinstance(obj, list):
            return [self._replace_env_variables(item) for item in obj]
        elif isinstance(obj, str):
            if obj.startswith('${') and obj.endswith('}'):
                var_expr = obj[2:-1]
                if ':' in var_expr:
                    var_name, default_value = var_expr.split(':', 1)
                    return os.getenv(var_name, default_value)
                else:
                    return os.getenv(var_expr, obj)
            return obj
        else:
            return obj

    def get(self, key: str, default: Any = None) -> Any:
        """
        Obtiene un valor de configuración usando notación de puntos

        Args:
            key: Clave en notación de puntos (ej: 'ga.example_one.p_size')
            default: Valor por defecto

        Returns:
            Valor de configuración
        """
        keys = key.split('.')
        value = self.config

        for k in keys:
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default

        return value

    def get_ga_defaults(self, preset: str = "example_one") -> Dict[str, Any]:
        """
        Obtiene los parámetros del GA para un preset

        Args:
            preset: Nombre del preset ('example_one' o 'example_two')

        Returns:
            Diccionario de parámetros (vacío si el preset no existe)
        """
        params = self.get(f'ga.{preset}', None)
        if params is None:
            logger.warning(f"⚠️  Preset GA '{preset}' no encontrado, usando valores del modelo")
            return {}
        return dict(params)

    def get_pso_defaults(self, preset: str = "example_one") -> Dict[str, Any]:
        """
        Obtiene los parámetros del PSO para un preset

        Args:
            preset: Nombre del preset ('example_one' o 'example_two')

        Returns:
            Diccionario de parámetros (vacío si el preset no existe)
        """
        params = self.get(f'pso.{preset}', None)
        if params is None:
            logger.warning(f"⚠️  Preset PSO '{preset}' no encontrado, usando valores del modelo")
            return {}
        return dict(params)

    def get_oracle_config(self) -> Dict[str, Any]:
        """Configuración del oráculo Monte Carlo"""
        oracle = self.get('oracle', {})
        return {
            'trials': int(oracle.get('trials', 1_000_000)),
            'partition_size': int(oracle.get('partition_size', 250_000)),
            'workers': int(oracle.get('workers', 1)),
            'agree_sigmas': float(oracle.get('agree_sigmas', 4.0)),
            'agree_floor': float(oracle.get('agree_floor', 1e-3)),
        }

    def get_erlang_config(self) -> Dict[str, Any]:
        """Configuración del modelo Erlang y de las curvas de confiabilidad"""
        erlang = self.get('erlang', {})
        component = erlang.get('core_component', 'mips_core')
        if component not in LOGICAL_ELEMENTS:
            raise InvalidConfig(f"core_component desconocido: {component} (opciones: {', '.join(LOGICAL_ELEMENTS)})")
        return {
            'element_scale': float(erlang.get('element_scale', 1.0e-8)),
            'core_component': component,
            'core_elements': LOGICAL_ELEMENTS[component],
            'cores': int(erlang.get('cores', 2)),
            'oics': [int(v) for v in erlang.get('oics', [2, 3, 4])],
            't_start': float(erlang.get('t_start', 0.0)),
            't_end': float(erlang.get('t_end', 20000.0)),
            't_steps': int(erlang.get('t_steps', 101)),
            'mttf_rel_tol': float(erlang.get('mttf_rel_tol', 1e-8)),
        }

    def get_data_dir(self) -> Path:
        """Directorio de datos (instancias y asignaciones publicadas)"""
        return self._resolve(self.get('paths.data_dir', 'data'))

    def get_output_dir(self) -> Path:
        """Directorio de salida para trazas, gráficos y manifiestos"""
        return self._resolve(self.get('paths.output_dir', 'outputs'))

    def get_interval_sets_path(self) -> Path:
        """Ruta del archivo con los conjuntos de intervalos de referencia"""
        return self._resolve(self.get('paths.interval_sets', 'data/instances/interval_sets.json'))

    def get_logging_level(self) -> str:
        """Nivel de logging configurado"""
        return str(self.get('logging.level', 'INFO')).upper()

    def get_default_seed(self) -> int:
        """Semilla maestra por defecto"""
        return int(self.get('runs.default_seed', 20240601))

    def get_run_workers(self) -> int:
        """Hilos para corridas independientes"""
        return max(1, int(self.get('runs.workers', 1)))

    def _resolve(self, value: Any) -> Path:
        path = Path(str(value))
        return path if path.is_absolute() else PROJECT_ROOT / path


# Instancia global del gestor de configuración
config_manager = ConfigManager()


def get_config() -> ConfigManager:
    """
    Obtiene la instancia global del gestor de configuración

    Returns:
        Instancia de ConfigManager
    """
    return config_manager


def load_config(config_path: str = None) -> ConfigManager:
    """
    Carga una nueva instancia del gestor de configuración

    Args:
        config_path: Ruta al archivo de configuración

    Returns:
        Nueva instancia de ConfigManager
    """
    return ConfigManager(config_path)


def get_presets() -> List[str]:
    """Presets de solver disponibles en la configuración"""
    return sorted(config_manager.get('ga', {}).keys())


def main():
    """Función para probar la configuración"""
    print("=== CONFIGURACIÓN DEL PROYECTO ===")

    print(f"Archivo de configuración: {config_manager.config_path}")
    print(f"Configuración cargada: {'✓' if config_manager.config else '✗'}")

    print(f"Presets disponibles: {get_presets()}")
    ga = config_manager.get_ga_defaults('example_one')
    print(f"GA example_one: p_size={ga.get('p_size')} m_gen={ga.get('m_gen')}")
    pso = config_manager.get_pso_defaults('example_one')
    print(f"PSO example_one: swarm={pso.get('swarm')} iterations={pso.get('iterations')}")

    erlang = config_manager.get_erlang_config()
    print(f"Escala de elementos: {erlang['element_scale']}")
    print(f"Directorio de salida: {config_manager.get_output_dir()}")


if __name__ == "__main__":
    main()
