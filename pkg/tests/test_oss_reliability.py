#!/usr/bin/env python3
"""
Pruebas de la confiabilidad One-Shot-System y sus casos especiales
"""

import sys
import os
sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'src'))

from itertools import product

import numpy as np
import pytest

from analysis.interval_core import Interval
from analysis.oss_reliability import (
    OssConfig,
    best_startup_for_function,
    effective_wakeup,
    function_reliabilities,
    function_reliability,
    interval_reliability_all_ready,
    interval_system_reliability,
    readiness_weights,
    reliability_all_ready,
    single_core_single_oic,
    special_case_identical_components,
    special_case_identical_readiness,
    special_case_parallel,
    special_case_series,
    system_reliability,
)
from utils.errors import (
    EnumerationTooLarge,
    InvalidConfig,
    NoCandidate,
    NonIdenticalWakeup,
    NonUniformReadiness,
    ShapeMismatch,
)

MONOTONE_TRIALS = 1000
SPECIAL_CASE_CONFIGS = 1000
ARGMAX_INSTANCES = 500


def brute_force_reliability(rd, p, a, x, r):
    """Suma explícita sobre todos los estados listo/no listo"""
    m, n = p.shape
    E = np.where(x, 1.0, p)
    total = 0.0
    for state in product([0, 1], repeat=m):
        ready = np.array(state, dtype=bool)
        if not ready.any():
            continue
        weight = np.prod(np.where(ready, rd, 1.0 - rd))
        success = 1.0
        for j in range(n):
            fail = 1.0
            for i in range(m):
                if ready[i] and a[i, j]:
                    fail *= 1.0 - r * E[i, j]
            success *= 1.0 - fail
        total += weight * success
    return total


def random_config(rng, m, n):
    rd = rng.uniform(0.5, 1.0, m)
    p = rng.uniform(0.0, 1.0, (m, n))
    a = rng.random((m, n)) < 0.7
    x = (rng.random((m, n)) < 0.4) & a
    return OssConfig(rd=rd, p=p, a=a, x=x)


def test_config_validation():
    print("🔍 Probando validación de configuraciones...")
    ones = np.ones((2, 2))
    with pytest.raises(InvalidConfig):
        OssConfig(rd=[0.9, 0.9], p=ones, a=np.zeros((2, 2)), x=ones)
    with pytest.raises(ShapeMismatch):
        OssConfig(rd=[0.9], p=ones, a=ones, x=ones)
    with pytest.raises(InvalidConfig):
        OssConfig(rd=[0.9, 1.2], p=ones, a=ones, x=ones)
    with pytest.raises(InvalidConfig):
        OssConfig(rd=[0.9, 0.9], p=ones, a=ones, x=ones, r=Interval(0.5, 1.5))
    with pytest.raises(InvalidConfig):
        OssConfig(rd=[0.9, 0.9], p=ones, a=ones, x=ones, selected=(0, 0))
    print("✅ Validación OK")


def test_effective_wakeup():
    E = effective_wakeup(np.array([[1, 0]]), np.array([[0.3, 0.4]])).E
    assert np.allclose(E, [[1.0, 0.4]])


def test_single_oic_single_function_interval():
    cfg = OssConfig(rd=[0.99], p=[[0.9]], a=[[1]], x=[[1]], r=Interval(0.8, 0.9))
    value = interval_system_reliability(cfg)
    assert value.lo == pytest.approx(0.792)
    assert value.hi == pytest.approx(0.891)
    assert single_core_single_oic(cfg, 0.8) == pytest.approx(0.792)


def test_general_formula_matches_brute_force():
    print("🔍 Comparando la fórmula general contra la enumeración explícita...")
    rng = np.random.default_rng(3)
    for _ in range(60):
        m, n = rng.integers(1, 5), rng.integers(1, 4)
        cfg = random_config(rng, m, n)
        r = rng.uniform(0, 1)
        expected = brute_force_reliability(cfg.rd, cfg.p, cfg.a, cfg.x, r)
        assert system_reliability(cfg, r) == pytest.approx(expected, abs=1e-12)
    print("✅ Fórmula general OK")


def test_all_ready_term_example_one():
    p = np.array([[0.98, 0.9, 0.9, 0.96, 0.87, 0.87],
                  [0.82, 0.82, 0.82, 0.9, 0.9, 0.9],
                  [0.0, 0.9, 0.9, 0.9, 0.9, 0.9]])
    ones = np.ones_like(p)
    cfg = OssConfig(rd=[0.99] * 3, p=p, a=ones, x=ones, r=Interval(0.89, 0.95))
    value = interval_reliability_all_ready(cfg)
    assert value.hi == pytest.approx(0.99 ** 3 * (1 - 0.05 ** 3) ** 6, rel=1e-12)
    assert value.lo == pytest.approx(0.99 ** 3 * (1 - 0.11 ** 3) ** 6, rel=1e-12)
    assert value.hi <= 0.99 ** 3
    assert reliability_all_ready(cfg, 1.0) == pytest.approx(0.99 ** 3)
    # el término con todas listas nunca supera a la enumeración completa
    assert reliability_all_ready(cfg, 0.95) <= system_reliability(cfg, 0.95)


def test_interval_endpoints_match_point_evaluations():
    rng = np.random.default_rng(8)
    cfg = random_config(rng, 3, 3).with_r(Interval(0.7, 0.9))
    value = interval_system_reliability(cfg)
    assert value.lo == pytest.approx(system_reliability(cfg, 0.7), abs=1e-15)
    assert value.hi == pytest.approx(system_reliability(cfg, 0.9), abs=1e-15)


def test_monotone_in_availability_and_startup():
    print("🔍 Probando monotonía en A y X...")
    rng = np.random.default_rng(21)
    for _ in range(MONOTONE_TRIALS):
        lo, hi = np.sort(rng.uniform(0, 1, 2))
        cfg = random_config(rng, 3, 3).with_r(Interval(lo, hi))
        base = interval_system_reliability(cfg)
        free = np.argwhere(~cfg.a)
        if free.size:
            i, j = free[rng.integers(len(free))]
            a = cfg.a.copy()
            a[i, j] = True
            grown = interval_system_reliability(cfg.with_allocation(cfg.x, a))
            assert grown.lo >= base.lo - 1e-15
            assert grown.hi >= base.hi - 1e-15
        unstarted = np.argwhere(cfg.a & ~cfg.x)
        if unstarted.size:
            i, j = unstarted[rng.integers(len(unstarted))]
            x = cfg.x.copy()
            x[i, j] = True
            started = interval_system_reliability(cfg.with_allocation(x, cfg.a))
            assert started.lo >= base.lo - 1e-15
            assert started.hi >= base.hi - 1e-15
    print("✅ Monotonía OK")


def test_readiness_weights_sum_to_one():
    weights = readiness_weights([0.9, 0.8, 0.7])
    assert weights.size == 8
    assert weights.sum() == pytest.approx(1.0)
    assert weights[0] == pytest.approx(0.1 * 0.2 * 0.3)
    assert weights[-1] == pytest.approx(0.9 * 0.8 * 0.7)

    rng = np.random.default_rng(13)
    for _ in range(100):
        rd = rng.uniform(0, 1, rng.integers(1, 11))
        weights = readiness_weights(rd)
        assert weights.size == 2 ** rd.size
        assert np.all(weights >= 0)
        assert weights.sum() == pytest.approx(1.0, abs=1e-12)
        assert weights[-1] == pytest.approx(np.prod(rd))
        assert weights[0] == pytest.approx(np.prod(1 - rd))


def test_two_oic_hand_example():
    cfg = OssConfig(rd=[0.9, 0.8], p=[[0.7], [0.5]], a=[[1], [1]], x=[[1], [0]])
    # ambas listas 0.6804, solo la primera 0.162, solo la segunda 0.036
    assert system_reliability(cfg, 0.9) == pytest.approx(0.8784, abs=1e-12)
    assert brute_force_reliability(cfg.rd, cfg.p, cfg.a, cfg.x, 0.9) == pytest.approx(0.8784, abs=1e-12)

    uniform = OssConfig(rd=[0.9, 0.9], p=cfg.p, a=cfg.a, x=cfg.x)
    assert special_case_identical_readiness(uniform, 0.9, 0.9) == pytest.approx(
        system_reliability(uniform, 0.9), abs=1e-12)


def test_special_cases_agree_with_general_formula():
    print("🔍 Probando los casos especiales...")
    rng = np.random.default_rng(17)
    for _ in range(SPECIAL_CASE_CONFIGS):
        m, n = rng.integers(1, 5), rng.integers(1, 4)
        r = rng.uniform(0, 1)

        rd = rng.uniform(0.5, 1.0)
        cfg = random_config(rng, m, n)
        uniform = OssConfig(rd=[rd] * m, p=cfg.p, a=cfg.a, x=cfg.x)
        assert special_case_identical_readiness(uniform, rd, r) == pytest.approx(
            system_reliability(uniform, r), abs=1e-12)

        rds = rng.uniform(0.5, 1.0, m)
        eye = np.eye(m)
        series = OssConfig(rd=rds, p=rng.uniform(0, 1, (m, m)), a=eye, x=eye)
        assert special_case_series(rds, r, m) == pytest.approx(system_reliability(series, r), abs=1e-12)

        ones = np.ones((m, n))
        parallel = OssConfig(rd=rds, p=ones, a=ones, x=np.zeros((m, n)))
        assert special_case_parallel(rds) == pytest.approx(system_reliability(parallel, 1.0), abs=1e-12)

        P = rng.uniform(0, 1, n)
        identical = OssConfig(rd=rds, p=np.tile(P, (m, 1)), a=cfg.a, x=cfg.x)
        assert special_case_identical_components(identical, P, r) == pytest.approx(
            system_reliability(identical, r), abs=1e-12)
    print("✅ Casos especiales OK")


def test_special_case_premise_errors():
    cfg = OssConfig(rd=[0.9, 0.8], p=[[0.5], [0.6]], a=[[1], [1]], x=[[0], [0]])
    with pytest.raises(NonUniformReadiness):
        special_case_identical_readiness(cfg, 0.9, 0.5)
    with pytest.raises(NonIdenticalWakeup):
        special_case_identical_components(cfg, [0.5], 0.5)
    with pytest.raises(InvalidConfig):
        special_case_series([0.9, 0.9], 0.5, 3)


def test_enumeration_guard():
    m = 21
    cfg = OssConfig(rd=[0.9] * m, p=np.full((m, 1), 0.5), a=np.ones((m, 1)), x=np.zeros((m, 1)))
    with pytest.raises(EnumerationTooLarge):
        system_reliability(cfg, 0.9)
    # el término con todas listas no enumera
    assert 0.0 <= reliability_all_ready(cfg, 0.9) <= 1.0


def test_function_reliability_and_best_startup():
    cfg = OssConfig(rd=[0.99, 0.99], p=[[0.5], [0.9]], a=[[1], [1]], x=[[0], [0]])
    expected = 1 - (1 - 0.99 * 0.9 * 0.5) * (1 - 0.99 * 0.9 * 0.9)
    assert function_reliability(cfg, 0, r_point=0.9) == pytest.approx(expected)
    assert function_reliabilities(cfg.rd, cfg.p, cfg.a, 0.9)[0] == pytest.approx(expected)
    # arrancar la copia más débil da la mayor ganancia
    assert best_startup_for_function(cfg, 0, 0.9) == 0

    tied = OssConfig(rd=[0.99, 0.99], p=[[0.7], [0.7]], a=[[1], [1]], x=[[0], [0]])
    assert best_startup_for_function(tied, 0, 0.9) == 0

    empty = OssConfig(rd=[0.99], p=[[0.7]], a=[[0]], x=[[0]])
    assert function_reliability(empty, 0, r_point=0.9) == 0.0
    with pytest.raises(NoCandidate):
        best_startup_for_function(empty, 0, 0.9)


def test_best_startup_matches_exhaustive_search():
    print("🔍 Comparando el mejor arranque contra la búsqueda exhaustiva...")
    rng = np.random.default_rng(29)
    for _ in range(ARGMAX_INSTANCES):
        m, n = rng.integers(1, 6), rng.integers(1, 4)
        cfg = random_config(rng, m, n)
        r = rng.uniform(0.1, 1.0)
        j = int(rng.integers(n))
        candidates = np.flatnonzero(cfg.a[:, j])
        if candidates.size == 0:
            continue
        best, best_value = None, -np.inf
        for i in candidates:
            x = cfg.x.copy()
            x[:, j] = False
            x[i, j] = True
            value = function_reliability(cfg.with_allocation(x, cfg.a), j, r_point=r)
            if value > best_value:
                best, best_value = int(i), value
        assert best_startup_for_function(cfg, j, r) == best
    print("✅ Mejor arranque OK")


if __name__ == "__main__":
    test_config_validation()
    test_effective_wakeup()
    test_single_oic_single_function_interval()
    test_general_formula_matches_brute_force()
    test_all_ready_term_example_one()
    test_interval_endpoints_match_point_evaluations()
    test_monotone_in_availability_and_startup()
    test_readiness_weights_sum_to_one()
    test_two_oic_hand_example()
    test_special_cases_agree_with_general_formula()
    test_special_case_premise_errors()
    test_enumeration_guard()
    test_function_reliability_and_best_startup()
    test_best_startup_matches_exhaustive_search()
    print("🎉 Pruebas de confiabilidad completadas")
