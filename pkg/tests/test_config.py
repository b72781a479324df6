#!/usr/bin/env python3
"""
Pruebas del gestor de configuración
"""

import sys
import os
sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'src'))

import pytest

from config.reference_data import LOGICAL_ELEMENTS
from utils.config import PROJECT_ROOT, get_config, load_config
from utils.errors import InvalidConfig

SAMPLE = """
logging:
  level: "${RAP_TEST_LEVEL:warning}"
paths:
  output_dir: "${RAP_TEST_OUT}"
ga:
  tiny:
    p_size: 8
erlang:
  element_scale: "${RAP_TEST_SCALE:2.5e-8}"
  oics: [2, 5]
"""


def test_environment_substitution(tmp_path, monkeypatch):
    print("🔍 Probando sustitución de variables de entorno...")
    path = tmp_path / "config.yaml"
    path.write_text(SAMPLE, encoding='utf-8')
    monkeypatch.delenv("RAP_TEST_LEVEL", raising=False)
    monkeypatch.setenv("RAP_TEST_OUT", str(tmp_path / "outputs"))
    monkeypatch.setenv("RAP_TEST_SCALE", "4e-9")

    config = load_config(str(path))
    assert config.get_logging_level() == "WARNING"
    assert config.get_output_dir() == tmp_path / "outputs"
    assert config.get_erlang_config()['element_scale'] == 4e-9
    assert config.get_erlang_config()['oics'] == [2, 5]
    print("✅ Sustitución OK")


def test_dotted_get_and_missing_presets(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text(SAMPLE, encoding='utf-8')
    config = load_config(str(path))
    assert config.get('ga.tiny.p_size') == 8
    assert config.get('ga.tiny.m_gen', 200) == 200
    assert config.get_ga_defaults('tiny') == {'p_size': 8}
    assert config.get_ga_defaults('missing') == {}
    assert config.get_pso_defaults('tiny') == {}


def test_core_component_selection(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text(SAMPLE + "  core_component: oic\n", encoding='utf-8')
    erlang = load_config(str(path)).get_erlang_config()
    assert erlang['core_component'] == "oic"
    assert erlang['core_elements'] == 530

    path.write_text(SAMPLE + "  core_component: gpu\n", encoding='utf-8')
    with pytest.raises(InvalidConfig):
        load_config(str(path)).get_erlang_config()


def test_missing_file_gives_defaults(tmp_path):
    config = load_config(str(tmp_path / "nope.yaml"))
    assert config.config == {}
    assert config.get_default_seed() == 20240601
    assert config.get_oracle_config()['trials'] == 1_000_000
    assert config.get_data_dir() == PROJECT_ROOT / "data"


def test_project_configuration():
    config = get_config()
    ga = config.get_ga_defaults('example_one')
    pso = config.get_pso_defaults('example_one')
    assert ga['p_size'] == 100
    assert pso['swarm'] == 30
    assert config.get_pso_defaults('example_two')['swarm'] == 50
    assert pso['subtraction'] == "moore"
    assert pso['local_search'] is True
    erlang = config.get_erlang_config()
    assert erlang['core_component'] == "mips_core"
    assert erlang['core_elements'] == LOGICAL_ELEMENTS["mips_core"] == 19988
    assert isinstance(erlang['element_scale'], float)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
