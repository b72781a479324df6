"""
Generador de salidas de experimentos
Trazas CSV, manifiestos JSON, asignaciones en formato publicado y gráficos SVG
"""

import json
import logging
import os
import tempfile
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from optimization.rap_problem import SolverReport  # noqa: E402

logger = logging.getLogger(__name__)


@dataclass
class RunManifest:
    """Todo lo necesario para repetir una corrida"""

    command: str
    instance: Optional[str]
    params: Dict
    seed: Optional[int]
    version: str
    rng_algorithm: str
    outputs: List[str] = field(default_factory=list)
    wall_time: float = 0.0
    created: str = field(default_factory=lambda: datetime.now().strftime('%Y-%m-%d %H:%M:%S'))
    extra: Dict = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return asdict(self)


def _atomic_target(path: Path) -> str:
    path.parent.mkdir(parents=True, exist_ok=True)
    handle, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    os.close(handle)
    return tmp


class ExperimentReportGenerator:
    """Escribe los archivos de una corrida bajo un directorio de salida"""

    def __init__(self, output_dir: Path):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.written: List[str] = []
        self.colors = {
            'primary': '#1f77b4',
            'secondary': '#ff7f0e',
            'success': '#2ca02c',
            'danger': '#d62728',
            'info': '#17a2b8',
            'dark': '#343a40'
        }

    def _commit(self, tmp: str, path: Path) -> Path:
        os.replace(tmp, path)
        self.written.append(str(path))
        logger.debug(f"💾 Archivo escrito: {path}")
        return path

    def write_csv(self, frame: pd.DataFrame, name: str) -> Path:
        """Escribe un CSV de forma atómica"""
        path = self.output_dir / name
        tmp = _atomic_target(path)
        frame.to_csv(tmp, index=False)
        return self._commit(tmp, path)

    def write_json(self, payload: Dict, name: str) -> Path:
        path = self.output_dir / name
        tmp = _atomic_target(path)
        with open(tmp, 'w', encoding='utf-8') as handle:
            json.dump(payload, handle, indent=2, ensure_ascii=False, default=str)
        return self._commit(tmp, path)

    def write_text(self, text: str, name: str) -> Path:
        path = self.output_dir / name
        tmp = _atomic_target(path)
        with open(tmp, 'w', encoding='utf-8') as handle:
            handle.write(text.rstrip("\n") + "\n")
        return self._commit(tmp, path)

    def _save_figure(self, fig, name: str) -> Path:
        path = self.output_dir / name
        tmp = _atomic_target(path)
        fig.savefig(tmp, format="svg", bbox_inches="tight")
        plt.close(fig)
        return self._commit(tmp, path)

    def create_convergence_chart(self, trace: pd.DataFrame, x_column: str, title: str, name: str) -> Path:
        """
        Gráfico de confiabilidad (inferior/superior) contra generaciones o iteraciones

        Args:
            trace: Traza con best_lo y best_hi
            x_column: 'generation' o 'iteration'
            title: Título del gráfico
            name: Nombre del archivo SVG
        """
        fig, ax = plt.subplots(figsize=(8, 5))
        ax.plot(trace[x_column], trace['best_hi'], color=self.colors['primary'], label='Superior')
        ax.plot(trace[x_column], trace['best_lo'], color=self.colors['secondary'], label='Inferior')
        ax.fill_between(trace[x_column], trace['best_lo'], trace['best_hi'],
                        color=self.colors['primary'], alpha=0.15)
        ax.set_xlabel('Generaciones' if x_column == 'generation' else 'Iteraciones')
        ax.set_ylabel('Confiabilidad del sistema')
        ax.set_title(title)
        ax.grid(True, alpha=0.3)
        ax.legend()
        return self._save_figure(fig, name)

    def create_sweep_chart(self, summary: pd.DataFrame, parameter: str, name: str) -> Path:
        """Mejor confiabilidad (inferior/superior) por valor del parámetro barrido"""
        best = summary.groupby('value', sort=True)[['best_lo', 'best_hi']].max().reset_index()
        fig, ax = plt.subplots(figsize=(8, 5))
        ax.plot(best['value'], best['best_hi'], marker='o', color=self.colors['primary'], label='Superior')
        ax.plot(best['value'], best['best_lo'], marker='s', color=self.colors['secondary'], label='Inferior')
        ax.set_xlabel(parameter)
        ax.set_ylabel('Confiabilidad del sistema')
        ax.set_title(f'Confiabilidad vs {parameter}')
        ax.grid(True, alpha=0.3)
        ax.legend()
        return self._save_figure(fig, name)

    def create_curve_chart(self, curve: pd.DataFrame, series: Sequence[str], name: str) -> Path:
        """Confiabilidad del sistema contra el tiempo, una serie por cantidad de OICs"""
        fig, ax = plt.subplots(figsize=(8, 5))
        palette = list(self.colors.values())
        for index, column in enumerate(series):
            ax.plot(curve['t'], curve[column], color=palette[index % len(palette)], label=column)
        ax.set_xlabel('Tiempo (horas)')
        ax.set_ylabel('Confiabilidad del sistema')
        ax.set_title('Confiabilidad del sistema vs tiempo')
        ax.grid(True, alpha=0.3)
        ax.legend()
        return self._save_figure(fig, name)

    def write_solver_outputs(self, report: SolverReport, prefix: str) -> Dict[str, Path]:
        """
        Traza CSV, asignación en formato publicado y gráfico de convergencia

        Args:
            report: Resultado del solver
            prefix: Prefijo de los archivos

        Returns:
            Rutas escritas por tipo
        """
        x_column = 'generation' if 'generation' in report.trace.columns else 'iteration'
        return {
            'trace': self.write_csv(report.trace, f"{prefix}_trace.csv"),
            'allocation': self.write_text(report.best.format_published(), f"{prefix}_allocation.txt"),
            'chart': self.create_convergence_chart(
                report.trace, x_column, f"{report.solver} - {report.instance} (semilla {report.seed})",
                f"{prefix}_convergence.svg"),
        }

    def write_manifest(self, manifest: RunManifest, name: str = "manifest.json") -> Path:
        manifest.outputs = list(self.written)
        path = self.write_json(manifest.to_dict(), name)
        logger.info(f"💾 Manifiesto guardado en {path}")
        return path
