"""W-state based anonymous transmission.

Anonymous entanglement is established by distributing an N-party W
state and post-selecting on all non-sender/receiver parties measuring
zero; the surviving pair is a |Psi+> Bell state used to teleport the
payload.  Classical sub-protocols (collision detection, veto, logical
OR) enter only as storage dephasing on the stored halves (q1 while the
veto runs, q2 total on the receiver side) and as a failure probability
epsilon_corr.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import noise, sim, stats
from .sim import BlochAngles, DensityState

SENDER = "S"
RECEIVER = "R"

PSI_PLUS = np.zeros(4, dtype=complex)
PSI_PLUS[1] = PSI_PLUS[2] = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class GateNoise:
    """Noise channel attached to each applied correction gate."""

    kind: str  # "dephasing" | "depolarizing"
    q: float

    def __post_init__(self):
        if self.kind not in ("dephasing", "depolarizing"):
            raise ValueError(f"unknown gate-noise kind {self.kind!r}")
        if not 0.0 <= self.q <= 1.0:
            raise ValueError("gate-noise probability must be in [0, 1]")

    def apply(self, state: DensityState, qubit) -> DensityState:
        if self.kind == "dephasing":
            return noise.apply_dephasing(state, qubit, self.q)
        return noise.apply_depolarizing(state, qubit, self.q)


@dataclass(frozen=True)
class AnonConfig:
    """Noise parameters for one anonymous-transmission run."""

    n_parties: int = 4
    q1: float = 0.0  # dephasing on S and R while the veto protocol runs
    q2: float = 0.0  # total dephasing on R through the logical OR
    gate_noise: Optional[GateNoise] = None
    epsilon_corr: float = 0.0

    def __post_init__(self):
        if self.n_parties < 3:
            raise ValueError("need at least 3 parties")
        if not 0.0 <= self.q1 <= self.q2 < 0.5:
            raise ValueError("require 0 <= q1 <= q2 < 0.5")
        if not 0.0 <= self.epsilon_corr <= 1.0:
            raise ValueError("epsilon_corr must be in [0, 1]")

    def extra_dephasing(self) -> float:
        """q_extra with q1 composed with q_extra equal to q2."""
        if self.q2 == self.q1:
            return 0.0
        return (self.q2 - self.q1) / (1.0 - 2.0 * self.q1)


@dataclass(frozen=True)
class LossConfig:
    """Per-node transmittances for the failure-probability algebra."""

    n_parties: int = 4
    eta_d: float = 1.0
    eta_tr: float = 1.0
    eta_bsm: float = 1.0
    eta0: float = 1.0
    sender_ratio: float = 0.0
    receiver_ratio: float = 0.0

    def __post_init__(self):
        if self.n_parties < 3:
            raise ValueError("need at least 3 parties")
        for eta in (self.eta_d, self.eta_tr, self.eta_bsm, self.eta0):
            if not 0.0 <= eta <= 1.0:
                raise ValueError("transmittances must be in [0, 1]")

    def eta_node(self) -> float:
        """Transmittance of each of the N-2 measuring nodes."""
        return self.eta_d * self.eta_tr

    def eta_sender(self) -> float:
        return self.eta_tr * noise.memory_transmittance(self.eta0, self.sender_ratio)

    def eta_receiver(self) -> float:
        return self.eta_tr * noise.memory_transmittance(self.eta0, self.receiver_ratio)


def _party_labels(n_parties: int) -> tuple:
    return (SENDER, RECEIVER) + tuple(range(2, n_parties))


def establish_anonymous_entanglement(
    cfg: AnonConfig, rng: np.random.Generator
) -> Optional[DensityState]:
    """Distribute a W state, measure the N-2 bystanders in Z.

    Returns the two-qubit (S, R) state on success (all bystander
    outcomes zero, veto passes) and None on abort.
    """
    state = sim.w_state(cfg.n_parties, _party_labels(cfg.n_parties))
    for label in range(2, cfg.n_parties):
        outcome, state = sim.measure(state, label, "z", rng)
        if outcome != 0:
            return None
    return state


def _post_selected_pair(n_parties: int) -> DensityState:
    """The (S, R) state conditioned on a successful veto round."""
    state = sim.w_state(n_parties, _party_labels(n_parties))
    for label in range(2, n_parties):
        prob, state = sim.project(state, label, "z", 0)
        if state is None:
            raise RuntimeError("post-selection branch vanished")
    return state


def _corrected_branch(
    cfg: AnonConfig, r_state: DensityState, m1: int, m2: int
) -> DensityState:
    """Receiver-side post-processing for one pair of announced BSM bits.

    The |Psi+> resource needs an X correction when the second bit is 0
    and a Z correction when the first bit is 1; each correction gate
    that is actually applied is followed by the configured gate noise.
    """
    out = noise.apply_dephasing(r_state, RECEIVER, cfg.extra_dephasing())
    if m2 == 0:
        out = sim.apply_unitary(out, sim.X_MATRIX, [RECEIVER])
        if cfg.gate_noise is not None:
            out = cfg.gate_noise.apply(out, RECEIVER)
    if m1 == 1:
        out = sim.apply_unitary(out, sim.Z_MATRIX, [RECEIVER])
        if cfg.gate_noise is not None:
            out = cfg.gate_noise.apply(out, RECEIVER)
    return out


def _noisy_resource(cfg: AnonConfig, payload: DensityState) -> DensityState:
    """Payload qubit joined with the dephased (S, R) pair, BSM gates applied."""
    pair = _post_selected_pair(cfg.n_parties)
    pair = noise.apply_dephasing(pair, SENDER, cfg.q1)
    pair = noise.apply_dephasing(pair, RECEIVER, cfg.q1)
    full = sim.tensor_product(payload, pair)
    full = sim.apply_unitary(full, sim.CNOT_MATRIX, ["in", SENDER])
    full = sim.apply_unitary(full, sim.H_MATRIX, ["in"])
    return full


def teleport(cfg: AnonConfig, payload: BlochAngles, rng: np.random.Generator) -> DensityState:
    """One sampled teleportation; returns the receiver's output qubit."""
    full = _noisy_resource(cfg, sim.bloch_state(payload, "in"))
    m1, full = sim.measure(full, "in", "z", rng)
    m2, r_state = sim.measure(full, SENDER, "z", rng)
    return _corrected_branch(cfg, r_state, m1, m2)


def _branch_component(full: DensityState, m1: int, m2: int) -> DensityState:
    """Unnormalized receiver block for one pair of BSM outcomes.

    Keeping the branch unnormalized (its trace is the Born weight) makes
    the outcome-averaged output an exactly linear map of the payload.
    """
    n = full.n_qubits
    t = full.matrix.reshape((2,) * (2 * n))
    a_in, a_s = full.index("in"), full.index(SENDER)
    block = np.take(np.take(t, m1, axis=n + a_in), m1, axis=a_in)
    m = n - 1
    s_axis = a_s if a_s < a_in else a_s - 1
    block = np.take(np.take(block, m2, axis=m + s_axis), m2, axis=s_axis)
    dim = 2 ** (n - 2)
    return DensityState(
        tuple(l for l in full.labels if l not in ("in", SENDER)),
        block.reshape((dim, dim)),
    )


def _teleport_output_map(cfg: AnonConfig, payload_matrix: np.ndarray) -> np.ndarray:
    """Outcome-averaged output for an arbitrary payload operator."""
    payload = DensityState(("in",), np.asarray(payload_matrix, dtype=complex))
    full = _noisy_resource(cfg, payload)
    out = np.zeros((2, 2), dtype=complex)
    for m1 in (0, 1):
        for m2 in (0, 1):
            branch = _branch_component(full, m1, m2)
            out += _corrected_branch(cfg, branch, m1, m2).matrix
    return out


def teleport_exact(cfg: AnonConfig, payload: BlochAngles) -> np.ndarray:
    """Outcome-averaged teleport output density matrix (no sampling)."""
    return _teleport_output_map(cfg, sim.bloch_state(payload, "in").matrix)


_PAULIS = (np.eye(2, dtype=complex), sim.X_MATRIX, sim.Y_MATRIX, sim.Z_MATRIX)


def average_fidelity(cfg: AnonConfig, rng: Optional[np.random.Generator] = None) -> float:
    """Riemann average of the exact teleport fidelity over the Bloch sphere.

    Deterministic: each grid point uses the outcome-averaged output
    state, so the rng argument is unused.  The channel is linear, so it
    is evaluated once on the Pauli basis and recombined per grid point;
    this equals running the full pipeline at every point.
    """
    images = [_teleport_output_map(cfg, p) for p in _PAULIS]

    def point_fidelity(theta: float, phi: float) -> float:
        target = sim.bloch_state(BlochAngles(theta, phi), "out").matrix
        coeffs = [np.trace(target @ p).real for p in _PAULIS]
        rho_out = 0.5 * sum(c * img for c, img in zip(coeffs, images))
        return float(np.trace(rho_out @ target).real)

    return stats.riemann_sphere_average(point_fidelity)


def f_gamma(q1: float) -> float:
    """Bell-pair fidelity 1 - 2 q1 (1 - q1) after dephasing both halves."""
    if not 0.0 <= q1 <= 1.0:
        raise ValueError("q1 must be in [0, 1]")
    return 1.0 - 2.0 * q1 * (1.0 - q1)


def p_correct_anon(epsilon_corr: float) -> float:
    """Success probability of the classical subroutines: 1 - epsilon."""
    if not 0.0 <= epsilon_corr <= 1.0:
        raise ValueError("epsilon_corr must be in [0, 1]")
    return 1.0 - epsilon_corr


def _all_zero_probability(n_parties: int, lose_one: bool) -> float:
    """Chance that every surviving bystander measures zero, by simulation."""
    state = sim.w_state(n_parties, _party_labels(n_parties))
    measuring = list(range(2, n_parties))
    if lose_one:
        state = sim.partial_trace(state, set(state.labels) - {measuring[-1]})
        measuring = measuring[:-1]
    prob = 1.0
    for label in measuring:
        p, state = sim.project(state, label, "z", 0)
        prob *= p
        if state is None:
            return 0.0
    return prob


def p_fail(cfg: LossConfig) -> float:
    """Closed-form protocol failure probability under loss.

    Combines the veto post-selection odds (all-zero outcomes with an
    intact W state or with one lost particle) with per-node, memory and
    BSM transmittances; one nonresponsive bystander is tolerated.
    """
    n = cfg.n_parties
    eta = cfg.eta_node()
    pr_b = eta ** (n - 2)
    pr_c = (n - 2) * (1.0 - eta) * eta ** (n - 3)
    pr_d = cfg.eta_bsm * cfg.eta_sender() * cfg.eta_receiver()
    pr_az_b = 2.0 / n  # all-zero | all bystanders responsive
    pr_az_c = 3.0 / n  # all-zero | one bystander lost
    p = 1.0 - pr_d * (pr_b * pr_az_b + pr_c * pr_az_c)
    return min(1.0, max(0.0, p))


def p_fail_monte_carlo(
    cfg: LossConfig, trials: int, rng: np.random.Generator
) -> stats.IntervalEstimate:
    """Brute-force failure estimate: per-node Bernoulli losses plus veto.

    The all-zero veto probabilities are taken from the simulated W state
    (intact and after tracing out one particle), not from the closed
    form, so this is an independent check of p_fail.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = cfg.n_parties
    p_zero_intact = _all_zero_probability(n, lose_one=False)
    p_zero_lost = _all_zero_probability(n, lose_one=True)

    node_lost = rng.random((trials, n - 2)) >= cfg.eta_node()
    n_lost = node_lost.sum(axis=1)
    sender_ok = rng.random(trials) < cfg.eta_sender()
    receiver_ok = rng.random(trials) < cfg.eta_receiver()
    bsm_ok = rng.random(trials) < cfg.eta_bsm
    u_veto = rng.random(trials)

    pair_ok = sender_ok & receiver_ok & bsm_ok
    veto_pass = np.where(
        n_lost == 0, u_veto < p_zero_intact, u_veto < p_zero_lost
    )
    success = pair_ok & (n_lost <= 1) & veto_pass
    failures = int(trials - success.sum())
    return stats.wilson_interval(failures, trials, 0.95)
