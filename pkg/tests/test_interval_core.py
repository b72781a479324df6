#!/usr/bin/env python3
"""
Pruebas de la aritmética de intervalos y las relaciones de orden
"""

import sys
import os
sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'src'))

import numpy as np
import pytest

from analysis.interval_core import (
    ComparisonPolicy,
    Interval,
    IntervalVector,
    SubtractionMode,
    Verdict,
    best_index,
    compare_max,
    div,
    is_greater,
    mul,
    power,
    scale,
    sub,
)
from config.reference_data import INTERVAL_SETS
from utils.errors import DomainError, EmptySet, InvalidInterval, ZeroInDivisor

SAMPLES = 100_000


def test_construction_and_validation():
    print("🔍 Probando construcción de intervalos...")
    x = Interval(0.68, 0.72)
    assert x.center == pytest.approx(0.70)
    assert x.radius == pytest.approx(0.02)
    assert Interval.normalized(3, 1) == Interval(1, 3)
    assert Interval.from_center_radius(0.5, 0.1) == Interval(0.4, 0.6)
    assert Interval.point(0.3).is_degenerate()

    with pytest.raises(InvalidInterval):
        Interval(2, 1)
    with pytest.raises(InvalidInterval):
        Interval(float('nan'), 1)
    with pytest.raises(InvalidInterval):
        Interval.from_list([0.1, 0.2, 0.3])
    # también es ValueError
    with pytest.raises(ValueError):
        Interval(1, 0)
    print("✅ Construcción OK")


def test_arithmetic_cases():
    print("🔍 Probando operaciones básicas...")
    total = Interval(0.68, 0.72) + Interval(0.73, 0.75)
    assert total.lo == pytest.approx(1.41)
    assert total.hi == pytest.approx(1.47)

    moore = sub(Interval(0.73, 0.75), Interval(0.68, 0.72))
    assert moore.lo == pytest.approx(0.01)
    assert moore.hi == pytest.approx(0.07)
    printed = sub(Interval(0.73, 0.75), Interval(0.68, 0.72), SubtractionMode.AS_PRINTED)
    assert printed.lo == pytest.approx(0.03)
    assert printed.hi == pytest.approx(0.05)

    assert mul(Interval(-1, 2), Interval(3, 4)) == Interval(-4, 8)
    assert scale(-2, Interval(1, 3)) == Interval(-6, -2)
    assert 2 * Interval(1, 3) == Interval(2, 6)
    assert div(Interval(1, 2), Interval(2, 4)) == Interval(0.25, 1.0)
    print("✅ Operaciones OK")


def test_division_by_interval_containing_zero():
    with pytest.raises(ZeroInDivisor):
        div(Interval(1, 2), Interval(-1, 1))
    with pytest.raises(DomainError):
        Interval(1, 2) / Interval(0, 1)


def test_power_cases():
    assert power(Interval(-2, 3), 2) == Interval(0, 9)
    assert power(Interval(-3, -2), 2) == Interval(4, 9)
    assert power(Interval(-2, 3), 3) == Interval(-8, 27)
    assert power(Interval(2, 3), 0) == Interval(1, 1)
    squared = Interval(0.5, 0.9) ** 2
    assert squared.lo == pytest.approx(0.25)
    assert squared.hi == pytest.approx(0.81)
    with pytest.raises(InvalidInterval):
        power(Interval(1, 2), -1)


def test_comparison_policies():
    print("🔍 Probando relaciones de orden...")
    x, y = Interval(0.73, 0.75), Interval(0.68, 0.72)
    for policy in ComparisonPolicy:
        assert compare_max(x, y, policy).verdict is Verdict.GREATER
        assert compare_max(y, x, policy).verdict is Verdict.LESS

    # contención: el pesimista no decide y el combinado cae en el optimista
    wide, narrow = Interval(0.76, 0.86), Interval(0.77, 0.80)
    assert compare_max(wide, narrow, ComparisonPolicy.PESSIMISTIC).verdict is Verdict.EQUAL_OR_INCOMPARABLE
    assert is_greater(wide, narrow, ComparisonPolicy.COMBINED)
    assert is_greater(wide, narrow, ComparisonPolicy.OPTIMISTIC)

    # centro mayor o igual y radio menor gana bajo el pesimista
    assert is_greater(Interval(0.80, 0.82), Interval(0.70, 0.90), ComparisonPolicy.PESSIMISTIC)
    assert not is_greater(Interval(0.80, 0.82), Interval(0.70, 0.90), ComparisonPolicy.OPTIMISTIC)

    same = Interval(0.5, 0.6)
    assert compare_max(same, Interval(0.5, 0.6)).verdict is Verdict.EQUAL_OR_INCOMPARABLE
    print("✅ Relaciones de orden OK")


def test_best_index_on_reference_sets():
    set1 = [Interval(lo, hi) for lo, hi in INTERVAL_SETS["SET1"]]
    assert best_index(set1) == 4
    set5 = [Interval(lo, hi) for lo, hi in INTERVAL_SETS["SET5"]]
    assert set5[best_index(set5)] == Interval(0.91, 0.96)
    # empates conservan la primera aparición
    assert best_index([Interval(0.5, 0.6), Interval(0.5, 0.6)]) == 0
    with pytest.raises(EmptySet):
        best_index([])


def test_degenerate_intervals_match_real_arithmetic():
    rng = np.random.default_rng(11)
    for a, b in rng.uniform(-5, 5, size=(SAMPLES, 2)):
        x, y = Interval.point(a), Interval.point(b)
        assert (x + y) == Interval.point(a + b)
        assert sub(x, y) == Interval.point(a - b)
        assert sub(x, y, SubtractionMode.AS_PRINTED) == Interval.point(a - b)
        assert mul(x, y) == Interval.point(a * b)
        if b != 0:
            assert div(x, y).lo == pytest.approx(a / b, rel=1e-12)


def test_inclusion_monotonicity():
    print("🔍 Probando monotonía de inclusión...")
    rng = np.random.default_rng(5)
    for _ in range(SAMPLES):
        lo, hi = np.sort(rng.uniform(-3, 3, 2))
        big = Interval(lo, hi)
        small = Interval(*np.sort(rng.uniform(lo, hi, 2)))
        other = Interval(*np.sort(rng.uniform(-3, 3, 2)))
        assert (big + other).contains(small + other)
        assert sub(big, other).contains(sub(small, other))
        assert mul(big, other).contains(mul(small, other))
        assert power(big, 2).contains(power(small, 2))
    print("✅ Monotonía de inclusión OK")


def test_interval_vector_operations():
    x = IntervalVector(np.array([0.2, 0.4]), np.array([0.3, 0.9]))
    y = IntervalVector.points(np.array([0.1, 0.5]))

    moore = x.sub(y)
    assert np.allclose(moore.lo, [0.1, -0.1])
    assert np.allclose(moore.hi, [0.2, 0.4])
    printed = x.sub(y, SubtractionMode.AS_PRINTED)
    assert np.allclose(printed.lo, [0.1, -0.1])
    assert np.allclose(printed.hi, [0.2, 0.4])

    scaled = x.scale(-1.0)
    assert np.allclose(scaled.lo, [-0.3, -0.9])
    assert np.allclose(scaled.hi, [-0.2, -0.4])

    clamped = IntervalVector(np.array([-2.0, 0.5]), np.array([0.5, 3.0])).clamp_to_box(0.0, 1.0)
    assert np.allclose(clamped.lo, [0.0, 0.5])
    assert np.allclose(clamped.hi, [0.5, 1.0])
    assert x[1] == Interval(0.4, 0.9)
    assert len(x) == 2
    assert np.allclose(x.centers, [0.25, 0.65])

    capped = x.cap_width(0.2)
    assert np.allclose(capped.centers, x.centers)
    assert np.allclose(capped.widths, [0.1, 0.2])

    with pytest.raises(InvalidInterval):
        IntervalVector(np.array([1.0]), np.array([0.0]))


if __name__ == "__main__":
    test_construction_and_validation()
    test_arithmetic_cases()
    test_division_by_interval_containing_zero()
    test_power_cases()
    test_comparison_policies()
    test_best_index_on_reference_sets()
    test_degenerate_intervals_match_real_arithmetic()
    test_inclusion_monotonicity()
    test_interval_vector_operations()
    print("🎉 Pruebas de intervalos completadas")
