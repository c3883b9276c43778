import itertools
import json
import random

import pytest

from divmatch.instance import parse_instance, build_combination_index
from divmatch.objective import objective
from divmatch.oracle import BudgetExceededError, enumerate_optimal
from helpers import (random_feasible_assignment, random_feasible_matrix,
                     random_small_instance)


def make(doc):
    return parse_instance(json.dumps(doc))


EIGHT_VS_SIXTEEN = make({
    "features": [{"name": "c", "values": ["A", "B"]},
                 {"name": "g", "values": ["M", "F"]}],
    "workers": [[0, 0], [0, 0], [1, 1], [1, 1]],
    "teams": [{"name": "t1", "demand": 2}, {"name": "t2", "demand": 2}],
    "costs": {"mode": "class", "u": [[0, 0], [0, 0]]},
    "lambda0": 1, "lambdas": [1, 1]})


def test_known_instance_by_hand_enumeration():
    # with two columns of multiplicity two and demands (2, 2) there are
    # exactly three feasible matrices
    candidates = [
        [[0, 0], [2, 0], [0, 2]],
        [[0, 0], [1, 1], [1, 1]],
        [[0, 0], [0, 2], [2, 0]],
    ]
    values = [objective(EIGHT_VS_SIXTEEN, w).objective for w in candidates]
    assert sorted(values) == [8, 16, 16]
    result = enumerate_optimal(EIGHT_VS_SIXTEEN, collect_optima=True)
    assert result.optimal_objective == min(values) == 8
    assert result.num_optima == 1
    assert result.matrix == [[0, 0], [1, 1], [1, 1]]
    assert result.optima == [[[0, 0], [1, 1], [1, 1]]]


def test_zero_diversity_weights_reduce_to_min_cost():
    inst = make({
        "features": [{"name": "c", "values": ["A", "B"]}],
        "workers": [[0], [0], [1], [1]],
        "teams": [{"name": "t1", "demand": 2}, {"name": "t2", "demand": 1}],
        "costs": {"mode": "class", "u": [[4, 9], [1, 7]]},
        "lambda0": 1, "lambdas": [0]})
    # independent minimum: enumerate placements of the two columns directly
    best = None
    for a1, a2 in itertools.product(range(3), repeat=2):
        for b1, b2 in itertools.product(range(3), repeat=2):
            if a1 + a2 > 2 or b1 + b2 > 2:
                continue
            if a1 + b1 != 2 or a2 + b2 != 1:
                continue
            cost = 4 * a1 + 9 * b1 + 1 * a2 + 7 * b2
            best = cost if best is None else min(best, cost)
    result = enumerate_optimal(inst)
    assert result.optimal_objective == best


def test_single_team_full_demand_unique_matrix():
    inst = make({
        "features": [{"name": "c", "values": ["A", "B"]}],
        "workers": [[0], [0], [1]],
        "teams": [{"name": "t1", "demand": 3}],
        "costs": {"mode": "class", "u": [[2, 5]]},
        "lambda0": 1, "lambdas": [1]})
    result = enumerate_optimal(inst)
    assert result.num_optima == 1
    assert result.matrix == [[0, 0], [2, 1]]
    assert result.optimal_objective == objective(inst, result.matrix).objective


def test_budget_exceeded():
    inst = random_small_instance(5, worker_fraction=0.0)
    with pytest.raises(BudgetExceededError):
        enumerate_optimal(inst, budget=1)


def test_returned_matrix_attains_reported_optimum():
    for seed in range(30):
        inst = random_small_instance(seed + 600)
        result = enumerate_optimal(inst)
        state = (result.matrix if inst.costs.mode == "class"
                 else result.assignment)
        assert objective(inst, state).objective == result.optimal_objective


def test_optimum_lower_bounds_random_feasible_points():
    rng = random.Random(10)
    for seed in range(15):
        inst = random_small_instance(seed + 700, worker_fraction=0.0)
        index = build_combination_index(inst)
        result = enumerate_optimal(inst)
        for _ in range(100):
            w = random_feasible_matrix(inst, index, rng)
            assert objective(inst, w, index).objective >= \
                result.optimal_objective


def test_optimum_lower_bounds_random_worker_assignments():
    rng = random.Random(11)
    for seed in range(10):
        inst = random_small_instance(seed + 800, worker_fraction=1.0)
        result = enumerate_optimal(inst)
        for _ in range(60):
            assign = random_feasible_assignment(inst, rng)
            assert objective(inst, assign).objective >= \
                result.optimal_objective


def test_team_permutation_equivariance():
    rng = random.Random(12)
    for seed in range(12):
        inst = random_small_instance(seed + 950, worker_fraction=0.0)
        base = enumerate_optimal(inst).optimal_objective
        perm = list(range(inst.t))
        rng.shuffle(perm)
        doc = {
            "features": [{"name": f.name, "values": list(f.values)}
                         for f in inst.schema.features],
            "workers": [list(fv) for fv in inst.workers],
            "teams": [{"name": inst.teams[i].name,
                       "demand": inst.teams[i].demand} for i in perm],
            "costs": {"mode": "class",
                      "u": [list(inst.costs.table[i]) for i in perm]},
            "lambda0": inst.weights.lambda0,
            "lambdas": list(inst.weights.lambdas)}
        assert enumerate_optimal(make(doc)).optimal_objective == base


def test_value_relabel_equivariance():
    rng = random.Random(13)
    for seed in range(12):
        inst = random_small_instance(seed + 1000, worker_fraction=0.0)
        base = enumerate_optimal(inst).optimal_objective
        # permute the value order of the first feature, remapping workers
        # and the class cost columns accordingly
        width = inst.schema.value_count(0)
        perm = list(range(width))
        rng.shuffle(perm)
        inverse = [perm.index(v) for v in range(width)]
        doc = {
            "features": ([{"name": inst.schema.features[0].name,
                           "values": [inst.schema.features[0].values[v]
                                      for v in perm]}]
                         + [{"name": f.name, "values": list(f.values)}
                            for f in inst.schema.features[1:]]),
            "workers": [[inverse[fv[0]], *fv[1:]] for fv in inst.workers],
            "teams": [{"name": tm.name, "demand": tm.demand}
                      for tm in inst.teams],
            "costs": {"mode": "class",
                      "u": [[row[v] for v in perm]
                            for row in inst.costs.table]},
            "lambda0": inst.weights.lambda0,
            "lambdas": list(inst.weights.lambdas)}
        assert enumerate_optimal(make(doc)).optimal_objective == base


def test_worker_mode_general_costs_enumerates_maps():
    inst = make({
        "features": [{"name": "c", "values": ["A"]}],
        "workers": [[0], [0]],
        "teams": [{"name": "t1", "demand": 1}, {"name": "t2", "demand": 1}],
        "costs": {"mode": "worker", "u": [[5, 1], [2, 7]]},
        "lambda0": 1, "lambdas": [1]})
    result = enumerate_optimal(inst, collect_optima=True)
    # maps: (1,2) costs 5+7=12, (2,1) costs 2+1=3; diversity 2 either way
    assert result.optimal_objective == 5
    assert result.assignment == [2, 1]
    assert result.num_optima == 1
    assert result.optima == [[2, 1]]
