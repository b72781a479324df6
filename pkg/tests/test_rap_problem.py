#!/usr/bin/env python3
"""
Pruebas del problema de asignación: costo, evaluación, reparación y codificación
"""

import sys
import os
sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'src'))

import numpy as np
import pytest

from analysis.interval_core import Interval
from config.reference_data import INTERVAL_SETS
from data_sources.instance_loader import load_instance, parse_allocation_text
from optimization.rap_problem import (
    Allocation,
    CostMode,
    Objective,
    RapInstance,
    check_cost,
    evaluate,
    fitness_better,
    max_interval_in_set,
    place_copies,
    random_feasible_allocation,
    repair,
)
from utils.errors import EmptySet, InvalidConfig, ShapeMismatch
from utils.seeding import make_rng

PUBLISHED_SET1 = "101000 000010 101101 / 2 2 2 3 3 3"
R_BEST = Interval(0.89, 0.95)


@pytest.fixture
def example_one():
    return load_instance("example_one")


def test_published_allocation_cost(example_one):
    print("🔍 Probando el costo de la asignación publicada...")
    alloc = parse_allocation_text(PUBLISHED_SET1, example_one)
    check = check_cost(example_one, alloc)
    assert check.cost == 44
    assert check.total == 53
    assert check.per_oic == (8, 1, 44)
    assert check.within_budget

    total_mode = load_instance("example_one", cost_mode="total")
    assert check_cost(total_mode, alloc).cost == 53
    print("✅ Costo OK")


def test_placement_of_copies(example_one):
    alloc = parse_allocation_text(PUBLISHED_SET1, example_one)
    assert alloc.u.tolist() == [2, 2, 2, 3, 3, 3]
    # ADD, MOV e INC quedan en las OICs 1 y 3
    for j in range(3):
        assert alloc.a[:, j].tolist() == [1, 0, 1]
    assert alloc.a[:, 3:].all()
    assert alloc.format_published() == PUBLISHED_SET1


def test_all_supported_startup_cost_modes(example_one):
    ones = np.ones((example_one.m, example_one.n), dtype=np.uint8)
    alloc = Allocation(ones, ones)
    assert check_cost(example_one, alloc).cost == 50
    assert check_cost(example_one, alloc).total == 150

    fitness = evaluate(example_one, alloc, R_BEST)
    assert fitness.feasible
    assert fitness.value.hi == pytest.approx(0.99 ** 3 * (1 - 0.05 ** 3) ** 6, rel=1e-12)
    assert fitness.value.hi == pytest.approx(0.969571, abs=1e-6)
    assert fitness.value.hi <= 0.99 ** 3

    total_mode = load_instance("example_one", cost_mode=CostMode.TOTAL.value)
    assert not evaluate(total_mode, alloc, R_BEST).feasible


def test_evaluation_rules(example_one):
    empty = Allocation.empty(example_one.m, example_one.n)
    fitness = evaluate(example_one, empty, R_BEST)
    assert fitness.cost == 0
    assert not fitness.feasible
    assert fitness.value == Interval(0.0, 0.0)

    with pytest.raises(ShapeMismatch):
        evaluate(example_one, Allocation.empty(2, 2), R_BEST)

    feasible = evaluate(example_one, parse_allocation_text(PUBLISHED_SET1, example_one), R_BEST)
    assert fitness_better(feasible, fitness)
    assert not fitness_better(fitness, feasible)


def test_repair_restores_feasibility(example_one):
    print("🔍 Probando la reparación...")
    total_mode = load_instance("example_one", cost_mode="total")
    ones = np.ones((3, 6), dtype=np.uint8)
    repaired = repair(total_mode, Allocation(ones, ones))
    assert check_cost(total_mode, repaired).cost <= total_mode.budget
    assert np.all(repaired.u >= 1)
    assert np.all(repaired.a >= repaired.x)

    rng = make_rng(5)
    for _ in range(30):
        alloc = random_feasible_allocation(example_one, rng)
        assert evaluate(example_one, alloc, R_BEST).feasible
        assert repair(example_one, alloc) == alloc

    published = parse_allocation_text(PUBLISHED_SET1, example_one)
    assert repair(example_one, published) == published
    print("✅ Reparación OK")


def test_repair_clears_single_cheap_bit():
    print("🔍 Probando la reparación con un exceso de un ciclo...")
    inst = RapInstance("tight", readiness=[0.99, 0.99], wakeup=[[0.5, 0.99, 0.5], [0.6, 0.6, 0.6]],
                       cost=[[4, 1, 4], [4, 1, 4]], budget=8, r_set=(Interval(0.9, 0.9),))
    x = np.array([[1, 1, 1], [0, 0, 0]], dtype=np.uint8)
    a = np.ones((2, 3), dtype=np.uint8)
    over = Allocation(x, a)
    assert check_cost(inst, over).cost == 9

    repaired = repair(inst, over)
    assert repaired.x.tolist() == [[1, 0, 1], [0, 0, 0]]
    assert repaired.a.tolist() == a.tolist()
    assert check_cost(inst, repaired).cost == 8

    # coincide con la mejor eliminación de un solo bit
    r = inst.decision_r
    removals = []
    for j in range(3):
        trial = x.copy()
        trial[0, j] = 0
        removals.append(evaluate(inst, Allocation(trial, a), r))
    best = max(range(3), key=lambda j: removals[j].value.hi)
    assert best == 1
    assert evaluate(inst, repaired, r) == removals[best]
    print("✅ Reparación mínima OK")


def test_objective_override(example_one):
    alloc = parse_allocation_text(PUBLISHED_SET1, example_one)
    full_inst = load_instance("example_one", objective="full")
    full = evaluate(example_one, alloc, R_BEST, objective=Objective.FULL)
    assert full == evaluate(full_inst, alloc, R_BEST)
    assert full.value.hi >= evaluate(example_one, alloc, R_BEST).value.hi
    assert evaluate(full_inst, alloc, R_BEST, objective=Objective.ALL_READY) == evaluate(example_one, alloc, R_BEST)


def test_repair_covers_missing_functions(example_one):
    repaired = repair(example_one, Allocation.empty(3, 6))
    assert repaired.u.tolist() == [1] * 6
    # ADD va a la OIC con mayor p (0.98)
    assert repaired.a[0, 0] == 1
    assert not repaired.x.any()


def test_genome_round_trip(example_one):
    alloc = parse_allocation_text(PUBLISHED_SET1, example_one)
    genome = alloc.genome()
    assert genome.size == example_one.genome_length
    assert Allocation.from_genome(genome, 3, 6) == alloc
    assert hash(Allocation.from_genome(genome, 3, 6)) == hash(alloc)
    with pytest.raises(ShapeMismatch):
        Allocation.from_genome(genome[:-1], 3, 6)


def test_monotone_in_availability(example_one):
    rng = make_rng(9)
    for _ in range(30):
        alloc = random_feasible_allocation(example_one, rng)
        base = evaluate(example_one, alloc, R_BEST).value
        free = np.argwhere(alloc.a == 0)
        if free.size == 0:
            continue
        i, j = free[0]
        a = alloc.a.copy()
        a[i, j] = 1
        grown = evaluate(example_one, Allocation(alloc.x, a), R_BEST).value
        assert grown.lo >= base.lo - 1e-15
        assert grown.hi >= base.hi - 1e-15


def test_max_interval_in_set():
    set1 = [Interval(lo, hi) for lo, hi in INTERVAL_SETS["SET1"]]
    assert max_interval_in_set(set1) == R_BEST
    with pytest.raises(EmptySet):
        max_interval_in_set([])


def test_instance_validation():
    ones = np.ones((2, 2))
    with pytest.raises(ShapeMismatch):
        RapInstance("bad", readiness=[0.9], wakeup=ones, cost=ones, budget=10)
    with pytest.raises(InvalidConfig):
        RapInstance("bad", readiness=[0.9, 0.9], wakeup=ones, cost=ones, budget=0)
    with pytest.raises(InvalidConfig):
        RapInstance("bad", readiness=[0.9, 0.9], wakeup=ones, cost=-ones, budget=10)
    with pytest.raises(InvalidConfig):
        RapInstance("bad", readiness=[0.9, 0.9], wakeup=ones, cost=ones, budget=10,
                    unsupported=[[1, 0], [1, 0]])

    inst = RapInstance("ok", readiness=[0.9, 0.9], wakeup=ones, cost=ones, budget=10)
    assert inst.function_names == ("F1", "F2")
    assert inst.decision_r == Interval(1.0, 1.0)
    with pytest.raises(InvalidConfig):
        place_copies(inst, np.zeros((2, 2)), [3, 1])


if __name__ == "__main__":
    inst = load_instance("example_one")
    test_published_allocation_cost(inst)
    test_placement_of_copies(inst)
    test_all_supported_startup_cost_modes(inst)
    test_evaluation_rules(inst)
    test_repair_restores_feasibility(inst)
    test_repair_clears_single_cheap_bit()
    test_objective_override(inst)
    test_repair_covers_missing_functions(inst)
    test_genome_round_trip(inst)
    test_monotone_in_availability(inst)
    test_max_interval_in_set()
    test_instance_validation()
    print("🎉 Pruebas del RAP completadas")
