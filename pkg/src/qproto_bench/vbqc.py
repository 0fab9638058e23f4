"""Three-qubit measurement-based verifiable blind computation.

The server holds q1, q3, q5, each entangled with a client qubit (q2,
q4, q6).  Test rounds trap the server with dummy/trap qubits chosen by
a random colouring u; computation rounds evaluate a three-angle
single-qubit program on input x.  Every gate is followed by
depolarizing noise on the qubits it touches (rotated measurements count
one basis-change gate), and every readout is flipped through the
asymmetric bit-flip model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import noise, sim
from .noise import DecoherenceLedger, MeasurementFlip, T1T2
from .sim import DensityState
from .stats import IntervalEstimate, wilson_interval

PI = math.pi
ANGLE_SET = tuple(k * PI / 8.0 for k in range(8))

SERVER_QUBITS = ("q1", "q3", "q5")
CLIENT_QUBITS = ("q2", "q4", "q6")

PHI_PLUS = np.zeros(4, dtype=complex)
PHI_PLUS[0] = PHI_PLUS[3] = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class GateDurations:
    """Nominal gate times (seconds) for the NV-style platform."""

    single_qubit: float = 5e-9
    cnot: float = 20e-6
    cz: float = 20e-6
    measurement: float = 3.7e-6


@dataclass(frozen=True)
class VbqcProfile:
    """Noise settings for one protocol run."""

    gate_depolarizing_q: float = 0.0
    flips: MeasurementFlip = field(default_factory=lambda: MeasurementFlip(0.05, 0.005))
    durations: GateDurations = field(default_factory=GateDurations)
    memory: Optional[T1T2] = None  # memory decoherence off by default

    def __post_init__(self):
        if not 0.0 <= self.gate_depolarizing_q <= 1.0:
            raise ValueError("depolarizing probability must be in [0, 1]")


@dataclass(frozen=True)
class VbqcParams:
    """Protocol parameters: d computation runs, t test runs, threshold w."""

    d: int
    t: int
    w: int
    x: int
    phis: tuple[float, float, float]
    k_colourings: int = 2

    def __post_init__(self):
        if self.d < 1 or self.t < 1:
            raise ValueError("d and t must be >= 1")
        if not 0 <= self.w <= self.t:
            raise ValueError("w must be in [0, t]")
        if self.x not in (0, 1):
            raise ValueError("x must be a bit")
        for phi in self.phis:
            if not any(abs(phi - c) < 1e-9 for c in ANGLE_SET):
                raise ValueError(f"angle {phi} not in the protocol angle set")


class _Round:
    """One round's quantum state plus gate/measurement noise bookkeeping."""

    def __init__(self, profile: VbqcProfile, rng: np.random.Generator):
        self.profile = profile
        self.rng = rng
        self.time = 0.0
        self.ledger = DecoherenceLedger(profile.memory) if profile.memory else None
        pair = sim.pure_state(PHI_PLUS, ("a", "b"))
        state = None
        for server_q, client_q in zip(SERVER_QUBITS, CLIENT_QUBITS):
            link = DensityState((server_q, client_q), pair.matrix.copy())
            state = link if state is None else sim.tensor_product(state, link)
        self.state = state

    def _elapse(self, duration: float, qubits) -> None:
        self.time += duration
        if self.ledger is not None:
            for q in qubits:
                if q in self.state.labels:
                    self.state = self.ledger.touch(self.state, q, self.time)

    def _depolarize(self, qubits) -> None:
        q = self.profile.gate_depolarizing_q
        if q > 0:
            for target in qubits:
                self.state = noise.apply_depolarizing(self.state, target, q)

    def cz(self, a: str, b: str) -> None:
        self._elapse(self.profile.durations.cz, (a, b))
        self.state = sim.apply_unitary(self.state, sim.CZ_MATRIX, [a, b])
        self._depolarize((a, b))

    def measure(self, qubit: str, angle: Optional[float]) -> int:
        """Measure in |+-_angle> (or Z when angle is None); returns the
        recorded outcome after readout flips."""
        if angle is not None:
            rotation = sim.H_MATRIX @ sim.rot_z_matrix(-angle)
            self._elapse(self.profile.durations.single_qubit, (qubit,))
            self.state = sim.apply_unitary(self.state, rotation, [qubit])
            self._depolarize((qubit,))
        self._elapse(self.profile.durations.measurement, (qubit,))
        outcome, self.state = sim.measure(self.state, qubit, "z", self.rng)
        return noise.flip_outcome(outcome, self.profile.flips, self.rng)


def _random_angle(rng: np.random.Generator) -> float:
    return ANGLE_SET[int(rng.integers(0, 8))]


def run_test_round(profile: VbqcProfile, rng: np.random.Generator) -> bool:
    """One trap round; True when the verified server bits match."""
    rnd = _Round(profile, rng)
    rnd.cz("q1", "q3")
    rnd.cz("q3", "q5")
    u = int(rng.integers(1, 3))
    th1, th2, th3 = (_random_angle(rng) for _ in range(3))
    if u == 1:
        g1 = rnd.measure("q2", -th1)
        g3 = rnd.measure("q6", -th3)
        d2 = rnd.measure("q4", None)
    else:
        g2 = rnd.measure("q4", -th2)
        d1 = rnd.measure("q2", None)
        d3 = rnd.measure("q6", None)
    r1, r2, r3 = (int(b) for b in rng.integers(0, 2, size=3))
    if u == 1:
        delta1 = th1 + (r1 + d2 + g1) * PI
        delta2 = _random_angle(rng)
        delta3 = th3 + (r3 + d2 + g3) * PI
    else:
        delta1 = _random_angle(rng)
        delta2 = th2 + (r2 + d1 + d3 + g2) * PI
        delta3 = _random_angle(rng)
    b1 = rnd.measure("q1", delta1)
    b2 = rnd.measure("q3", delta2)
    b3 = rnd.measure("q5", delta3)
    if u == 1:
        return b1 == r1 and b3 == r3
    return b2 == r2


def run_computation_round(
    profile: VbqcProfile, params: VbqcParams, rng: np.random.Generator
) -> int:
    """One delegated computation round; returns the output bit b3 xor r3."""
    phi1, phi2, phi3 = params.phis
    rnd = _Round(profile, rng)
    rnd.cz("q1", "q3")
    rnd.cz("q3", "q5")
    th1, th2, th3 = (_random_angle(rng) for _ in range(3))
    g1 = rnd.measure("q2", -th1)
    g2 = rnd.measure("q4", -th2)
    g3 = rnd.measure("q6", -th3)
    r1, r2, r3 = (int(b) for b in rng.integers(0, 2, size=3))
    delta1 = phi1 + th1 + (params.x + r1 + g1) * PI
    b1 = rnd.measure("q1", delta1)
    delta2 = (-1.0) ** (b1 + r1) * phi2 + th2 + (r2 + g2) * PI
    b2 = rnd.measure("q3", delta2)
    delta3 = (-1.0) ** (b2 + r2) * phi3 + th3 + (b1 + r1 + r3 + g3) * PI
    b3 = rnd.measure("q5", delta3)
    return b3 ^ r3


def computation_oracle_p1(x: int, phis: tuple[float, float, float]) -> float:
    """Direct-circuit reference: P(output = 1) for the delegated program.

    The pattern feeds the input in the X basis, so the ideal circuit is
    H Rz(phi3) H Rz(phi2) H Rz(phi1) applied to H|x>, measured in Z.
    """
    v = np.zeros(2, dtype=complex)
    v[x] = 1.0
    v = sim.H_MATRIX @ v
    for phi in phis:
        v = sim.H_MATRIX @ (sim.rot_z_matrix(phi) @ v)
    return float(abs(v[1]) ** 2)


def estimate_test_failure(
    profile: VbqcProfile, trials: int, confidence: float, rng: np.random.Generator
) -> IntervalEstimate:
    """Wilson interval on the test-round failure probability."""
    if trials < 100:
        raise ValueError("need at least 100 trials")
    failures = sum(0 if run_test_round(profile, rng) else 1 for _ in range(trials))
    return wilson_interval(failures, trials, confidence)


def wt_feasible_range(p_max: float, k: int) -> Optional[tuple[float, float]]:
    """Open interval of acceptable w/t ratios: (p_max, 1/2k), or None."""
    if k < 1:
        raise ValueError("k must be >= 1")
    upper = 1.0 / (2.0 * k)
    if p_max >= upper:
        return None
    return (p_max, upper)


def run_protocol(
    profile: VbqcProfile, params: VbqcParams, rng: np.random.Generator
) -> Optional[int]:
    """Full protocol: t test and d computation rounds in random order.

    Returns None on abort (more than w failed tests), otherwise the
    majority vote over the computation outputs (ties broken by a client
    coin flip).
    """
    kinds = np.array([0] * params.t + [1] * params.d)
    rng.shuffle(kinds)
    failed_tests = 0
    outputs = []
    for kind in kinds:
        if kind == 0:
            if not run_test_round(profile, rng):
                failed_tests += 1
        else:
            outputs.append(run_computation_round(profile, params, rng))
    if failed_tests > params.w:
        return None
    ones = sum(outputs)
    zeros = len(outputs) - ones
    if ones == zeros:
        return int(rng.integers(0, 2))
    return 1 if ones > zeros else 0
