"""Backward benchmarking: search for minimal hardware improvements.

Instead of fixing hardware parameters and reading off figures of merit,
fix the target (banknote verification probability c above the security
threshold at a given storage time) and minimize a cost that charges
progressively more as memory times approach perfection.  A small
genetic algorithm with tournament selection, uniform crossover,
log-normal mutation and elitism does the searching; only improvements
over the baseline are considered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .money import BanknoteConfig, estimate_c
from .noise import HardwareProfile, MeasurementFlip

UPPER_FACTOR = 1e4  # search ceiling per coordinate, relative to baseline

Objective = Callable[["Genome", np.random.Generator], float]


@dataclass(frozen=True)
class Genome:
    """Candidate memory parameters (seconds)."""

    t1: float
    t2: float

    def __post_init__(self):
        if self.t1 <= 0 or self.t2 <= 0:
            raise ValueError("T1 and T2 must be positive")
        if self.t2 > 2.0 * self.t1 + 1e-9:
            raise ValueError("T2 cannot exceed 2*T1")


@dataclass(frozen=True)
class CostWeights:
    """Weights of the security indicator and the hardware-cost terms."""

    w1: float = 1000.0
    w2: float = 1.0
    c_min: float = 0.875

    def __post_init__(self):
        if self.w1 < 0 or self.w2 < 0 or (self.w1 == 0 and self.w2 == 0):
            raise ValueError("weights must be nonnegative and not both zero")


@dataclass(frozen=True)
class GaParams:
    population: int = 32
    generations: int = 60
    tournament_size: int = 3
    mutation_sigma: float = 0.3
    elitism: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.population < 4:
            raise ValueError("population must be >= 4")
        if not 0 <= self.elitism < self.population:
            raise ValueError("elitism must be smaller than the population")
        if self.tournament_size < 1 or self.generations < 1:
            raise ValueError("tournament size and generations must be >= 1")


def squash(t: float) -> float:
    """Map a positive time constant into (0, 1): t / (1 + t)."""
    if t <= 0:
        raise ValueError("time constant must be positive")
    return t / (1.0 + t)


def hardware_cost(genome: Genome, baseline: Genome) -> float:
    """Progressive-hardness cost; 2 exactly at the baseline.

    Each coordinate contributes 1 / log_{b'}(t') with both the squashed
    value and base in (0, 1), so the term rises from 1 toward infinity
    as the parameter approaches its perfect value.
    """
    total = 0.0
    for t, b in ((genome.t1, baseline.t1), (genome.t2, baseline.t2)):
        if t < b * (1.0 - 1e-12):
            raise ValueError(f"parameter {t} below baseline {b}: only improvements are costed")
        log_ratio = math.log(squash(t)) / math.log(squash(b))
        total += 1.0 / log_ratio
    return total


def total_cost(genome: Genome, baseline: Genome, weights: CostWeights, c_estimate: float) -> float:
    """Security step penalty plus weighted hardware cost.

    The step is strict: c equal to c_min already counts as secure.
    """
    if not 0.0 <= c_estimate <= 1.0:
        raise ValueError("c estimate must be in [0, 1]")
    step = 1.0 if weights.c_min - c_estimate > 0.0 else 0.0
    return weights.w1 * step + weights.w2 * hardware_cost(genome, baseline)


def money_objective(
    storage_time: float,
    baseline: Genome,
    weights: CostWeights,
    flips: MeasurementFlip = MeasurementFlip(0.05, 0.005),
    block_size: int = 1000,
    repetitions: int = 5,
) -> Objective:
    """Cost of a genome judged by the simulated banknote verification rate."""

    def objective(genome: Genome, rng: np.random.Generator) -> float:
        profile = HardwareProfile(t1=genome.t1, t2=genome.t2, flips=flips)
        cfg = BanknoteConfig(block_size, storage_time, profile)
        est = estimate_c(cfg, block_size, repetitions, rng)
        return total_cost(genome, baseline, weights, est.mean)

    return objective


def _clamp(genome_t1: float, genome_t2: float, baseline: Genome) -> Genome:
    t1 = min(max(genome_t1, baseline.t1), baseline.t1 * UPPER_FACTOR)
    t2 = min(max(genome_t2, baseline.t2), baseline.t2 * UPPER_FACTOR)
    return Genome(t1, min(t2, 2.0 * t1))


def _evaluation_rng(master_seed: int, generation: int, index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(generation, index))
    return np.random.default_rng(seq)


def ga_optimize(
    objective: Objective,
    baseline: Genome,
    ga: GaParams,
    rng: np.random.Generator,
) -> tuple[Genome, list[float]]:
    """Minimize objective over genomes above the baseline.

    Tournament selection, per-coordinate uniform crossover, log-normal
    mutation (multiply by exp(N(0, sigma))) and elitism; elite costs are
    cached, so the per-generation best-cost history never increases.
    Each evaluation draws its own generator seeded by (master seed,
    generation, index) for thread-order independence.
    """

    def mutate(g: Genome) -> Genome:
        f1, f2 = np.exp(rng.normal(0.0, ga.mutation_sigma, size=2))
        return _clamp(g.t1 * f1, g.t2 * f2, baseline)

    def random_genome() -> Genome:
        # log-uniform over the whole search box so distant secure
        # regions are reachable even with a small mutation step
        u1, u2 = rng.random(2)
        return _clamp(
            baseline.t1 * UPPER_FACTOR**u1, baseline.t2 * UPPER_FACTOR**u2, baseline
        )

    population = [random_genome() for _ in range(ga.population)]
    costs = [
        objective(g, _evaluation_rng(ga.seed, 0, i)) for i, g in enumerate(population)
    ]

    history: list[float] = [min(costs)]
    for generation in range(1, ga.generations + 1):
        order = np.argsort(costs, kind="stable")
        elites = [(population[i], costs[i]) for i in order[: ga.elitism]]

        def tournament() -> Genome:
            picks = rng.integers(0, ga.population, size=ga.tournament_size)
            best = min(picks, key=lambda i: costs[i])
            return population[best]

        offspring = []
        while len(offspring) < ga.population - ga.elitism:
            p1, p2 = tournament(), tournament()
            t1 = p1.t1 if rng.random() < 0.5 else p2.t1
            t2 = p1.t2 if rng.random() < 0.5 else p2.t2
            offspring.append(mutate(_clamp(t1, t2, baseline)))

        new_costs = [
            objective(g, _evaluation_rng(ga.seed, generation, i))
            for i, g in enumerate(offspring)
        ]
        population = [g for g, _ in elites] + offspring
        costs = [c for _, c in elites] + new_costs
        history.append(min(costs))

    # Fresh re-evaluation so the winner is not just a lucky noisy draw
    # that survived as a cached elite.
    final_costs = [
        objective(g, _evaluation_rng(ga.seed, ga.generations + 1, i))
        for i, g in enumerate(population)
    ]
    best_idx = int(np.argmin(final_costs))
    return population[best_idx], history
