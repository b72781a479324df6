#!/usr/bin/env python3
"""
Script para verificar que todas las dependencias estén correctamente instaladas
"""

import sys
import importlib
from typing import Tuple

# Lista de dependencias principales
DEPENDENCIES = [
    ("numpy", "NumPy"),
    ("pandas", "Pandas"),
    ("scipy", "SciPy"),
    ("scipy.stats", "SciPy stats"),
    ("scipy.integrate", "SciPy integrate"),
    ("matplotlib", "Matplotlib"),
    ("yaml", "PyYAML"),
    ("dotenv", "Python-dotenv"),
    ("pydantic", "Pydantic"),
    ("concurrent.futures", "Concurrent Futures"),
]


def _try_import(module_name: str, package_name: str = None) -> Tuple[bool, str]:
    """
    Prueba importar un módulo específico
    """
    try:
        importlib.import_module(module_name)
        return True, f"✅ {package_name or module_name}"
    except ImportError as e:
        return False, f"❌ {package_name or module_name}: {e}"
    except Exception as e:
        return False, f"⚠️  {package_name or module_name}: {e}"


def test_core_dependencies():
    """Todas las dependencias principales se importan"""
    failures = [message for ok, message in (_try_import(m, n) for m, n in DEPENDENCIES) if not ok]
    assert not failures, failures


def test_matplotlib_headless_backend():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots()
    ax.plot([0, 1], [0, 1])
    plt.close(fig)
    assert matplotlib.get_backend().lower() == "agg"


def main():
    """
    Verifica todas las dependencias principales
    """
    print("🧪 VERIFICACIÓN DE DEPENDENCIAS")
    print("=" * 50)

    success_count = 0
    print("\n📦 DEPENDENCIAS PRINCIPALES:")
    print("-" * 30)
    for module, display_name in DEPENDENCIES:
        success, message = _try_import(module, display_name)
        print(message)
        if success:
            success_count += 1

    print(f"\n🧪 PRUEBAS ESPECÍFICAS:")
    print("-" * 30)

    try:
        from scipy import stats
        value = stats.poisson.cdf(0, 1.0)
        print(f"✅ SciPy - Poisson CDF ({value:.4f})")
    except Exception as e:
        print(f"❌ SciPy - Poisson CDF: {e}")

    try:
        import numpy as np
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([1, 0])))
        rng.random(3)
        print("✅ NumPy - Generador Philox")
    except Exception as e:
        print(f"❌ NumPy - Generador Philox: {e}")

    try:
        test_matplotlib_headless_backend()
        print("✅ Matplotlib - Backend Agg")
    except Exception as e:
        print(f"❌ Matplotlib - Backend Agg: {e}")

    # Resumen
    print(f"\n📊 RESUMEN:")
    print("=" * 30)
    print(f"✅ Dependencias principales: {success_count}/{len(DEPENDENCIES)}")

    print(f"\n🖥️  INFORMACIÓN DEL SISTEMA:")
    print("-" * 30)
    print(f"Python: {sys.version}")
    print(f"Plataforma: {sys.platform}")

    return success_count == len(DEPENDENCIES)


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
