"""Noise channels, measurement flips, loss algebra and the decoherence ledger.

The T1/T2 convention used throughout: amplitude damping with
gamma = 1 - exp(-dt/T1), composed with exactly enough pure dephasing
that the off-diagonal element decays by exp(-dt/T2) in total.  This is
the standard physical convention (T2 is the full transverse decay time)
and requires T2 <= 2*T1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable

import numpy as np

from . import sim
from .sim import DensityState

_ID2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class T1T2:
    """Relaxation/coherence time pair in seconds."""

    t1: float
    t2: float

    def __post_init__(self):
        if self.t1 <= 0 or self.t2 <= 0:
            raise ValueError("T1 and T2 must be positive")
        if self.t2 > 2.0 * self.t1 + 1e-12:
            raise ValueError(f"T2={self.t2} exceeds 2*T1={2 * self.t1}")


@dataclass(frozen=True)
class MeasurementFlip:
    """Classical readout error: 0->1 with p1, 1->0 with p2."""

    p1: float = 0.0
    p2: float = 0.0

    def __post_init__(self):
        for p in (self.p1, self.p2):
            if not 0.0 <= p <= 1.0:
                raise ValueError("flip probabilities must be in [0, 1]")


@dataclass(frozen=True)
class HardwareProfile:
    """Memory and readout parameters shared by the protocol benchmarks."""

    t1: float = 36000.0  # 10 hours
    t2: float = 1.0
    flips: MeasurementFlip = field(default_factory=MeasurementFlip)

    def memory(self) -> T1T2:
        return T1T2(self.t1, self.t2)


@dataclass(frozen=True)
class LossModel:
    """Transmittances of a lossy link plus memory-loss parameters."""

    eta_sys: float = 1.0
    fibre_length: float = 0.0  # km
    attenuation: float = 0.2  # dB/km
    eta_d: float = 1.0
    eta_bsm: float = 1.0
    eta0: float = 1.0
    storage_ratio: float = 0.0  # t_s / T1

    def __post_init__(self):
        for eta in (self.eta_sys, self.eta_d, self.eta_bsm, self.eta0):
            if not 0.0 <= eta <= 1.0:
                raise ValueError("transmittances must be in [0, 1]")
        if self.fibre_length < 0 or self.attenuation < 0:
            raise ValueError("length and attenuation must be nonnegative")
        if self.storage_ratio < 0:
            raise ValueError("storage ratio must be nonnegative")


def link_transmittance(model: LossModel) -> float:
    """System transmittance times fibre loss 10^(-att*L/10)."""
    return model.eta_sys * 10.0 ** (-model.attenuation * model.fibre_length / 10.0)


def memory_transmittance(eta0: float, storage_ratio: float) -> float:
    """Quantum-memory survival probability eta0 * exp(-t_s/T1)."""
    if not 0.0 <= eta0 <= 1.0:
        raise ValueError("eta0 must be in [0, 1]")
    if storage_ratio < 0:
        raise ValueError("storage ratio must be nonnegative")
    return eta0 * math.exp(-storage_ratio)


def t1t2_kraus(dt: float, t1: float, t2: float) -> list[np.ndarray]:
    """Kraus operators of the combined amplitude-damping + dephasing channel."""
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    T1T2(t1, t2)  # validates the pair
    gamma = 1.0 - math.exp(-dt / t1)
    # amplitude damping alone scales the off-diagonal by sqrt(1-gamma);
    # add dephasing so the total off-diagonal factor is exp(-dt/t2).
    lam_target = math.exp(-dt / t2)
    lam_ad = math.sqrt(1.0 - gamma)
    ratio = lam_target / lam_ad if lam_ad > 0 else 0.0
    q_z = max(0.0, min(0.5, (1.0 - ratio) / 2.0))
    a0 = np.array([[1, 0], [0, math.sqrt(1.0 - gamma)]], dtype=complex)
    a1 = np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=complex)
    kraus = []
    for a in (a0, a1):
        if q_z > 0:
            kraus.append(math.sqrt(1.0 - q_z) * a)
            kraus.append(math.sqrt(q_z) * (sim.Z_MATRIX @ a))
        else:
            kraus.append(a)
    return kraus


def apply_t1t2(state: DensityState, qubit: Hashable, dt: float, t1: float, t2: float) -> DensityState:
    """Store a qubit for dt seconds in a T1/T2-limited memory."""
    if dt == 0:
        return DensityState(state.labels, state.matrix.copy())
    return sim.apply_kraus(state, t1t2_kraus(dt, t1, t2), qubit)


def apply_dephasing(state: DensityState, qubit: Hashable, q: float) -> DensityState:
    """rho -> (1-q) rho + q Z rho Z on the target qubit."""
    if not 0.0 <= q <= 1.0:
        raise ValueError("dephasing probability must be in [0, 1]")
    kraus = [math.sqrt(1.0 - q) * _ID2, math.sqrt(q) * sim.Z_MATRIX]
    return sim.apply_kraus(state, kraus, qubit)


def apply_depolarizing(state: DensityState, qubit: Hashable, q: float) -> DensityState:
    """rho -> (1-q) rho + (q/3)(X rho X + Y rho Y + Z rho Z)."""
    if not 0.0 <= q <= 1.0:
        raise ValueError("depolarizing probability must be in [0, 1]")
    kraus = [
        math.sqrt(1.0 - q) * _ID2,
        math.sqrt(q / 3.0) * sim.X_MATRIX,
        math.sqrt(q / 3.0) * sim.Y_MATRIX,
        math.sqrt(q / 3.0) * sim.Z_MATRIX,
    ]
    return sim.apply_kraus(state, kraus, qubit)


def compose_dephasing(q1: float, q2: float) -> float:
    """Probability of the composition of two dephasing channels."""
    return q1 + q2 - 2.0 * q1 * q2


def storage_dephasing_probability(dt: float, t2: float) -> float:
    """Equivalent dephasing probability (1 - exp(-dt/T2)) / 2 for T1 >> dt."""
    return 0.5 * (1.0 - math.exp(-dt / t2))


def flip_outcome(bit: int, flips: MeasurementFlip, rng: np.random.Generator) -> int:
    """Apply the asymmetric readout-flip model to a classical outcome."""
    if bit == 0:
        return 1 if rng.random() < flips.p1 else 0
    return 0 if rng.random() < flips.p2 else 1


class DecoherenceLedger:
    """Lazy per-qubit memory noise: apply T1/T2 decay on demand.

    Tracks the last time each qubit was touched and applies the
    accumulated decoherence when the qubit is next used, replacing a
    full discrete-event engine.
    """

    def __init__(self, hardware: T1T2, start_time: float = 0.0):
        self.hardware = hardware
        self._last_touch: dict = {}
        self._start = start_time

    def last_touch(self, qubit: Hashable) -> float:
        return self._last_touch.get(qubit, self._start)

    def touch(self, state: DensityState, qubit: Hashable, now: float) -> DensityState:
        last = self.last_touch(qubit)
        if now < last - 1e-15:
            raise ValueError(f"time moved backwards for {qubit!r}: {now} < {last}")
        dt = max(0.0, now - last)
        self._last_touch[qubit] = now
        if dt == 0.0:
            return state
        return apply_t1t2(state, qubit, dt, self.hardware.t1, self.hardware.t2)
