"""Three-party quantum digital signatures over lossy links.

Alice runs a BB84-style key generation protocol (single photons, no
privacy amplification) separately with Bob and Charlie.  Each recipient
samples a fraction of his X-sifted bits for error estimation and swaps
half of the remainder with the other recipient, producing the signature
strings.  Security levels come from Serfling-bounded error rates: a
repudiation bound driven by the gap between the acceptance thresholds
and a forging bound driven by the phase-error entropy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
import numpy as np

from .noise import LossModel, link_transmittance
from .stats import binary_entropy, entropy_inverse, serfling_mu


class DegenerateInputError(ValueError):
    """Raised when sifted strings are too short to carve up."""


@dataclass(frozen=True)
class QdsConfig:
    """Protocol and channel parameters for one run."""

    n_photons: int = 50_000
    p_x: float = 0.5
    r: float = 0.1
    epsilon: float = 1e-10
    epsilon_pe: float = 1e-5
    a: float = 1e-5
    loss: LossModel = field(default_factory=lambda: LossModel(eta_sys=0.5))
    e_d: float = 0.0

    def __post_init__(self):
        if self.n_photons < 1:
            raise ValueError("n_photons must be >= 1")
        if not 0.5 <= self.p_x <= 1.0:
            raise ValueError("p_x must be in [0.5, 1]")
        if not 0.0 < self.r < 1.0:
            raise ValueError("r must be in (0, 1)")
        for name, val in (("epsilon", self.epsilon), ("epsilon_pe", self.epsilon_pe), ("a", self.a)):
            if not 0.0 < val < 1.0:
                raise ValueError(f"{name} must be in (0, 1)")
        if not 0.0 <= self.e_d <= 1.0:
            raise ValueError("e_d must be in [0, 1]")


@dataclass(frozen=True)
class KgpStrings:
    """Sifted key material from one Alice-recipient KGP."""

    x_alice: np.ndarray
    x_recipient: np.ndarray
    z_alice: np.ndarray
    z_recipient: np.ndarray
    n_sent: int
    n_detected: int

    @property
    def z_error_rate(self) -> float:
        if len(self.z_alice) == 0:
            return 0.0
        return float(np.mean(self.z_alice != self.z_recipient))


@dataclass(frozen=True)
class HalfStrings:
    """One half of a signature: Alice's bits aligned with a holder's bits."""

    alice: np.ndarray
    holder: np.ndarray

    def __post_init__(self):
        if len(self.alice) != len(self.holder):
            raise ValueError("half strings must have equal length")

    def mismatches(self) -> int:
        return int(np.count_nonzero(self.alice != self.holder))


@dataclass(frozen=True)
class SignatureStrings:
    """Assembled per-recipient signature material for one message bit.

    Each recipient holds two halves (his kept bits plus the bits the
    other recipient forwarded); l is the total per-recipient length.
    """

    bob_halves: tuple[HalfStrings, HalfStrings]
    charlie_halves: tuple[HalfStrings, HalfStrings]
    l: int


@dataclass(frozen=True)
class DistributionResult:
    strings: SignatureStrings
    e_obs_bob: float
    e_obs_charlie: float
    n_remaining_bob: int
    n_remaining_charlie: int
    k_sample_bob: int
    k_sample_charlie: int


@dataclass(frozen=True)
class QdsSecurityReport:
    """Figures of merit for one evaluated configuration."""

    p_abort: float
    p_rep: float
    p_for: float
    s_a: float
    s_v: float
    p_e: float
    e_u_x: float
    phi_u_x: float
    l: int

    def __post_init__(self):
        for name in ("p_abort", "p_rep", "p_for"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")


def run_kgp(cfg: QdsConfig, rng: np.random.Generator) -> KgpStrings:
    """One key generation protocol between Alice and a recipient.

    The recipient prepares single photons in random BB84 states (X
    basis with probability p_x), each surviving the link with the
    composed transmittance; Alice measures in a random basis and her
    sifted outcomes are flipped with probability e_d.  Only detected,
    matched-basis rounds are kept, split into X- and Z-sifted strings.
    """
    n = cfg.n_photons
    eta = link_transmittance(cfg.loss)
    basis_recipient = rng.random(n) < cfg.p_x  # True = X
    bits = rng.integers(0, 2, size=n, dtype=np.uint8)
    detected = rng.random(n) < eta
    basis_alice = rng.random(n) < cfg.p_x
    readout_flips = rng.random(n) < cfg.e_d
    sifted = detected & (basis_alice == basis_recipient)
    alice_bits = bits ^ readout_flips.astype(np.uint8)
    x_mask = sifted & basis_recipient
    z_mask = sifted & ~basis_recipient
    return KgpStrings(
        x_alice=alice_bits[x_mask],
        x_recipient=bits[x_mask],
        z_alice=alice_bits[z_mask],
        z_recipient=bits[z_mask],
        n_sent=n,
        n_detected=int(detected.sum()),
    )


def _sample_and_split(
    kgp: KgpStrings, r: float, rng: np.random.Generator
) -> tuple[float, np.ndarray, np.ndarray, int, int]:
    """Error-estimate sample plus keep/forward index halves."""
    n = len(kgp.x_recipient)
    if n < 10:
        raise DegenerateInputError(f"X-sifted string too short to sample ({n} bits)")
    k = max(1, int(round(r * n)))
    if n - k < 2:
        raise DegenerateInputError("no bits left after error sampling")
    perm = rng.permutation(n)
    sample, rest = perm[:k], perm[k:]
    e_obs = float(np.mean(kgp.x_alice[sample] != kgp.x_recipient[sample]))
    m = (len(rest) // 2) * 2  # drop one bit if odd so the halves match
    keep, forward = rest[: m // 2], rest[m // 2 : m]
    return e_obs, keep, forward, m, k


def distribution_stage(
    cfg: QdsConfig,
    kgp_bob: KgpStrings,
    kgp_charlie: KgpStrings,
    rng: np.random.Generator,
) -> DistributionResult:
    """Sampling, halving and swapping for one message bit."""
    e_b, keep_b, fwd_b, m_b, k_b = _sample_and_split(kgp_bob, cfg.r, rng)
    e_c, keep_c, fwd_c, m_c, k_c = _sample_and_split(kgp_charlie, cfg.r, rng)

    def half(kgp: KgpStrings, idx: np.ndarray) -> HalfStrings:
        return HalfStrings(alice=kgp.x_alice[idx], holder=kgp.x_recipient[idx])

    bob_halves = (half(kgp_bob, keep_b), half(kgp_charlie, fwd_c))
    charlie_halves = (half(kgp_charlie, keep_c), half(kgp_bob, fwd_b))
    l = m_b // 2 + m_c // 2
    strings = SignatureStrings(bob_halves, charlie_halves, l)
    return DistributionResult(strings, e_b, e_c, m_b, m_c, k_b, k_c)


def bound_errors(
    e_obs: float,
    n_remaining: int,
    k_sample: int,
    n_z_sample: int,
    e_z_obs: float,
    epsilon_pe: float,
) -> tuple[float, float]:
    """Serfling-bounded bit and phase error rates, capped at 1/2."""
    e_u_x = min(0.5, e_obs + serfling_mu(n_remaining, k_sample, epsilon_pe))
    phi_u_x = min(0.5, e_z_obs + serfling_mu(n_remaining, n_z_sample, epsilon_pe))
    return e_u_x, phi_u_x


def compute_thresholds(phi_u_x: float, e_u_x: float) -> tuple[float, float, float]:
    """Entropy threshold P_E and the acceptance/verification thresholds.

    s_a = (P_E + 2 e_u)/3 and s_v = (2 P_E + e_u)/3; note s_v exceeds
    s_a whenever P_E > e_u, which is the typical regime here.
    """
    if not 0.0 <= phi_u_x <= 0.5 or not 0.0 <= e_u_x <= 0.5:
        raise ValueError("error bounds must be in [0, 0.5]")
    p_e = entropy_inverse(1.0 - binary_entropy(phi_u_x))
    s_a = (p_e + 2.0 * e_u_x) / 3.0
    s_v = (2.0 * p_e + e_u_x) / 3.0
    return p_e, s_a, s_v


def security_levels(
    l: int, s_a: float, s_v: float, phi_u_x: float, cfg: QdsConfig
) -> tuple[float, float, float]:
    """(p_abort, p_rep, p_for) for the given signature length and thresholds."""
    if l < 1:
        raise ValueError("l must be >= 1")
    p_abort = 2.0 * cfg.epsilon_pe
    p_rep = min(1.0, 2.0 * math.exp(-0.5 * l * (s_a - s_v) ** 2))
    exponent = -l * (1.0 - binary_entropy(phi_u_x) - binary_entropy(s_v))
    if exponent > 1000.0:
        tail = math.inf
    elif exponent < -1000.0:
        tail = 0.0
    else:
        tail = 2.0**exponent
    epsilon_f = (cfg.epsilon + tail) / cfg.a
    p_for = min(1.0, cfg.a + epsilon_f + 8.0 * cfg.epsilon_pe)
    return min(1.0, p_abort), p_rep, p_for


def messaging_stage(
    strings: SignatureStrings, s_a: float, s_v: float
) -> tuple[bool, bool]:
    """Mismatch counting against Alice's declaration.

    Bob accepts (and forwards) when each of his halves has fewer than
    s_a * l mismatches; Charlie verifies against the stricter s_v * l.
    """
    l = strings.l
    bob_ok = all(h.mismatches() < s_a * l for h in strings.bob_halves)
    charlie_ok = all(h.mismatches() < s_v * l for h in strings.charlie_halves)
    return bob_ok, charlie_ok


def evaluate(cfg: QdsConfig, rng: np.random.Generator) -> QdsSecurityReport:
    """End-to-end pipeline for one message bit.

    Runs both KGPs, distributes and swaps the signature strings, bounds
    the error rates per recipient (taking the worse bound), derives the
    thresholds and evaluates the security levels.
    """
    kgp_bob = run_kgp(cfg, rng)
    kgp_charlie = run_kgp(cfg, rng)
    dist = distribution_stage(cfg, kgp_bob, kgp_charlie, rng)

    e_u_b, phi_u_b = bound_errors(
        dist.e_obs_bob,
        dist.n_remaining_bob,
        dist.k_sample_bob,
        max(1, len(kgp_bob.z_alice)),
        kgp_bob.z_error_rate,
        cfg.epsilon_pe,
    )
    e_u_c, phi_u_c = bound_errors(
        dist.e_obs_charlie,
        dist.n_remaining_charlie,
        dist.k_sample_charlie,
        max(1, len(kgp_charlie.z_alice)),
        kgp_charlie.z_error_rate,
        cfg.epsilon_pe,
    )
    e_u_x = max(e_u_b, e_u_c)
    phi_u_x = max(phi_u_b, phi_u_c)
    p_e, s_a, s_v = compute_thresholds(phi_u_x, e_u_x)
    p_abort, p_rep, p_for = security_levels(dist.strings.l, s_a, s_v, phi_u_x, cfg)
    return QdsSecurityReport(
        p_abort=p_abort,
        p_rep=p_rep,
        p_for=p_for,
        s_a=s_a,
        s_v=s_v,
        p_e=p_e,
        e_u_x=e_u_x,
        phi_u_x=phi_u_x,
        l=dist.strings.l,
    )
