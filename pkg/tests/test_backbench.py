import numpy as np
import pytest

from qproto_bench.backbench import (
    CostWeights,
    GaParams,
    Genome,
    ga_optimize,
    hardware_cost,
    money_objective,
    squash,
    total_cost,
)

BASELINE = Genome(t1=36000.0, t2=1.0)


def test_squash_values():
    assert squash(1.0) == 0.5
    assert squash(36000.0) == pytest.approx(0.9999722, abs=1e-7)
    assert squash(1e12) > 0.999999
    with pytest.raises(ValueError):
        squash(0.0)


def test_hardware_cost_baseline_is_exactly_two():
    assert hardware_cost(BASELINE, BASELINE) == 2.0


def test_hardware_cost_doubled_t2():
    cost = hardware_cost(Genome(36000.0, 2.0), BASELINE)
    assert cost == pytest.approx(2.7095113, abs=1e-6)


def test_hardware_cost_strictly_increasing_per_coordinate():
    costs_t2 = [hardware_cost(Genome(36000.0, t2), BASELINE) for t2 in (1.0, 2.0, 5.0, 50.0)]
    assert all(a < b for a, b in zip(costs_t2, costs_t2[1:]))
    costs_t1 = [hardware_cost(Genome(t1, 1.0), BASELINE) for t1 in (36000.0, 72000.0, 360000.0)]
    assert all(a < b for a, b in zip(costs_t1, costs_t1[1:]))


def test_hardware_cost_rejects_below_baseline():
    with pytest.raises(ValueError):
        hardware_cost(Genome(30000.0, 1.0), BASELINE)


def test_total_cost_step_behaviour():
    weights = CostWeights(w1=1000.0, w2=1.0, c_min=0.875)
    secure = total_cost(BASELINE, BASELINE, weights, 0.9)
    assert secure == 2.0
    boundary = total_cost(BASELINE, BASELINE, weights, 0.875)
    assert boundary == 2.0  # strict inequality: c == c_min counts as secure
    insecure = total_cost(BASELINE, BASELINE, weights, 0.874)
    assert insecure == 1002.0


def test_insecure_genomes_always_cost_more_than_finite_secure_ones():
    weights = CostWeights(w1=1000.0, w2=1.0)
    secure = total_cost(Genome(72000.0, 40.0), BASELINE, weights, 0.95)
    insecure = total_cost(BASELINE, BASELINE, weights, 0.1)
    assert insecure > secure


def test_argmin_invariant_under_w2_scaling():
    genomes = [Genome(36000.0, t2) for t2 in (2.0, 3.0, 8.0)]
    for scale in (1.0, 7.5):
        weights = CostWeights(w1=1000.0, w2=scale)
        costs = [total_cost(g, BASELINE, weights, 0.9) for g in genomes]
        assert int(np.argmin(costs)) == 0


def test_ga_recovers_baseline_on_pure_hardware_objective():
    objective = lambda g, rng: hardware_cost(g, BASELINE)
    ga = GaParams(population=32, generations=50, seed=1)
    best, history = ga_optimize(objective, BASELINE, ga, np.random.default_rng(1))
    assert hardware_cost(best, BASELINE) < 2.0 * 1.01
    assert all(a >= b for a, b in zip(history, history[1:]))


def test_ga_is_bit_reproducible():
    objective = money_objective(1.0, BASELINE, CostWeights(), block_size=200, repetitions=2)
    ga = GaParams(population=8, generations=4, seed=5)
    runs = [
        ga_optimize(objective, BASELINE, ga, np.random.default_rng(5)) for _ in range(2)
    ]
    assert runs[0][0] == runs[1][0]
    assert runs[0][1] == runs[1][1]


def test_ga_money_objective_finds_secure_frontier():
    objective = money_objective(1.0, BASELINE, CostWeights(w1=1000.0, w2=1.0))
    best, history = ga_optimize(
        objective, BASELINE, GaParams(seed=7), np.random.default_rng(7)
    )
    # security at storage 1 s demands T2 around twice the storage time
    assert 1.5 < best.t2 < 4.5
    assert history[-1] < 1000.0


def test_genome_and_params_validation():
    with pytest.raises(ValueError):
        Genome(1.0, 3.0)  # T2 > 2 T1
    with pytest.raises(ValueError):
        GaParams(population=2)
    with pytest.raises(ValueError):
        GaParams(elitism=40)
    with pytest.raises(ValueError):
        CostWeights(w1=0.0, w2=0.0)
