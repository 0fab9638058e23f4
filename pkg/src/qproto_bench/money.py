"""Private-key quantum money with classical verification.

Simulates the banknote lifecycle (random qubit pairs, memory storage,
verifier measurement with readout flips) and evaluates the analytic
security bounds driven by the per-pair verification probability c.
Security requires c > 7/8.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .noise import HardwareProfile
from .stats import IntervalEstimate, wilson_interval

C_SECURE_THRESHOLD = 0.875


@dataclass(frozen=True)
class BanknoteConfig:
    """One banknote: number of qubit pairs, client wait, hardware."""

    n_pairs: int
    wait_time: float
    profile: HardwareProfile

    def __post_init__(self):
        if self.n_pairs < 1:
            raise ValueError("n_pairs must be >= 1")
        if self.wait_time < 0:
            raise ValueError("wait_time must be nonnegative")


@dataclass(frozen=True)
class VerificationTally:
    """Counts from one verification round."""

    n_valid: int
    n_detected: int

    def __post_init__(self):
        if self.n_valid > self.n_detected:
            raise ValueError("n_valid cannot exceed n_detected")


def run_banknote_trial(cfg: BanknoteConfig, rng: np.random.Generator) -> VerificationTally:
    """Simulate one banknote block.

    Pairs are drawn uniformly from the eight-state set {|0+>, |0->,
    |1+>, |1->, |+0>, |-0>, |+1>, |-1>}, each qubit is stored for the
    wait time under T1/T2 noise, and the verifier measures each pair in
    a uniformly chosen basis with readout flips.  Only the qubit of a
    pair encoded in that pair's chosen basis is tallied; no loss is
    modeled, so n_detected equals n_pairs.  (Sampling the basis per pair
    rather than once per block keeps the pooled estimator binomial, so
    its Wilson interval is a valid confidence statement.)
    """
    bases = rng.integers(0, 2, size=cfg.n_pairs)  # 0 = Z, 1 = X
    states = rng.integers(0, 8, size=cfg.n_pairs)
    u_out = rng.random((cfg.n_pairs, 2))
    u_flip = rng.random((cfg.n_pairs, 2))
    gamma = 1.0 - math.exp(-cfg.wait_time / cfg.profile.t1)
    lam = math.exp(-cfg.wait_time / cfg.profile.t2)
    n_valid, n_detected = _kernels.simulate_pair_block(
        states, bases, u_out, u_flip, gamma, lam, cfg.profile.flips.p1, cfg.profile.flips.p2
    )
    return VerificationTally(n_valid, n_detected)


def estimate_c(
    cfg: BanknoteConfig,
    block_size: int,
    repetitions: int,
    rng: np.random.Generator,
) -> IntervalEstimate:
    """Pooled verification probability over repeated blocks, Wilson 95% CI."""
    if block_size < 1:
        raise ValueError("block_size must be >= 1")
    if repetitions < 2:
        raise ValueError("repetitions must be >= 2")
    block = BanknoteConfig(block_size, cfg.wait_time, cfg.profile)
    total_valid = 0
    total_detected = 0
    for _ in range(repetitions):
        tally = run_banknote_trial(block, rng)
        total_valid += tally.n_valid
        total_detected += tally.n_detected
    return wilson_interval(total_valid, total_detected, 0.95)


def delta(c: float) -> float:
    """Security margin 2c/3 - 7/12; zero exactly at c = 0.875."""
    if not 0.0 <= c <= 1.0:
        raise ValueError("c must be in [0, 1]")
    return 2.0 * c / 3.0 - 7.0 / 12.0


def _check_secure_regime(c: float) -> float:
    if c < C_SECURE_THRESHOLD:
        raise ValueError(f"c={c} is below the secure threshold {C_SECURE_THRESHOLD}")
    return delta(c)


def p_correct_bound(c: float, n: int) -> float:
    """Lower bound 1 - exp(-c n delta^2 / 2) on honest verification success.

    Vacuous (0) at c = 0.875; c below that is rejected as insecure.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    d = _check_secure_regime(c)
    return 1.0 - math.exp(-c * n * d * d / 2.0)


def p_forge_bound(c: float, n: int) -> float:
    """Upper bound exp(-n delta^2 / 4) on forging success.

    Vacuous (1) at c = 0.875; c below that is rejected as insecure.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    d = _check_secure_regime(c)
    return math.exp(-n * d * d / 4.0)


def min_pairs_for_forge(c: float, target: float) -> int:
    """Smallest n with p_forge_bound(c, n) <= target."""
    if not 0.0 < target < 1.0:
        raise ValueError("target must be in (0, 1)")
    if c <= C_SECURE_THRESHOLD:
        raise ValueError(f"c={c} gives no forging security (need c > {C_SECURE_THRESHOLD})")
    d = delta(c)
    return math.ceil(4.0 * math.log(1.0 / target) / (d * d))
