"""Shared estimators and special functions.

Wilson score intervals back every Monte-Carlo error bar in the suite
(they stay sane at 0/1 proportions, which really occur in noiseless
runs).  The Serfling term bounds unobserved error rates from a random
sample without replacement, and the spherical Riemann rule is the fixed
80x80 midpoint grid used for average teleportation fidelities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from scipy.stats import norm

GRID_POINTS = 80


@dataclass(frozen=True)
class IntervalEstimate:
    """Point estimate with a two-sided confidence interval."""

    mean: float
    lower: float
    upper: float
    confidence: float
    n_trials: int

    def __post_init__(self):
        if not 0.0 < self.confidence < 1.0:
            raise ValueError("confidence must be in (0, 1)")
        if not self.lower <= self.mean + 1e-12 or not self.mean <= self.upper + 1e-12:
            raise ValueError(
                f"interval ({self.lower}, {self.upper}) does not bracket mean {self.mean}"
            )

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> IntervalEstimate:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= successes <= trials:
        raise ValueError("successes must be in [0, trials]")
    z = float(norm.ppf(0.5 + confidence / 2.0))
    p_hat = successes / trials
    denom = 1.0 + z * z / trials
    center = (p_hat + z * z / (2.0 * trials)) / denom
    margin = (z / denom) * math.sqrt(
        p_hat * (1.0 - p_hat) / trials + z * z / (4.0 * trials * trials)
    )
    lower = 0.0 if successes == 0 else max(0.0, center - margin)
    upper = 1.0 if successes == trials else min(1.0, center + margin)
    return IntervalEstimate(
        mean=p_hat,
        lower=lower,
        upper=upper,
        confidence=confidence,
        n_trials=trials,
    )


def binary_entropy(x: float) -> float:
    """h(x) = -x log2 x - (1-x) log2 (1-x), with 0 log 0 := 0."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("argument must be in [0, 1]")
    if x in (0.0, 1.0):
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def entropy_inverse(y: float) -> float:
    """The unique x in [0, 0.5] with binary_entropy(x) = y, by bisection.

    Accuracy is limited to about sqrt(eps) near x = 0.5 where the
    entropy curve is flat.
    """
    if not 0.0 <= y <= 1.0:
        raise ValueError("argument must be in [0, 1]")
    if y == 0.0:
        return 0.0
    if y == 1.0:
        return 0.5
    lo, hi = 0.0, 0.5
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if binary_entropy(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def serfling_mu(n_remaining: int, k_sample: int, epsilon: float) -> float:
    """Sampling-without-replacement slack for an observed error rate.

    mu = sqrt((n+k)(k+1) ln(1/eps) / (2 n k^2)) with n remaining bits
    and k sampled bits.
    """
    if n_remaining < 1 or k_sample < 1:
        raise ValueError("counts must be >= 1")
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must be in (0, 1]")
    n, k = n_remaining, k_sample
    return math.sqrt((n + k) * (k + 1) * math.log(1.0 / epsilon) / (2.0 * n * k * k))


def sphere_grid() -> list[tuple[float, float]]:
    """Midpoint grid (theta_k, phi_m), 80x80 points over the sphere."""
    pts = []
    for k in range(GRID_POINTS):
        theta = math.pi / (2 * GRID_POINTS) + k * math.pi / GRID_POINTS
        for m in range(GRID_POINTS):
            phi = math.pi / GRID_POINTS + m * 2.0 * math.pi / GRID_POINTS
            pts.append((theta, phi))
    return pts


def riemann_sphere_average(f: Callable[[float, float], float]) -> float:
    """Midpoint-rule average of f over the sphere with the sin(theta) weight.

    (pi / (2 * 6400)) * sum_k sum_m f(theta_k, phi_m) sin(theta_k)
    """
    total = 0.0
    for theta, phi in sphere_grid():
        total += f(theta, phi) * math.sin(theta)
    return total * math.pi / (2.0 * GRID_POINTS * GRID_POINTS)
