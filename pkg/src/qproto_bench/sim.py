"""Dense density-matrix simulator for small labeled qubit registers.

States are plain values: every operation returns a new ``DensityState``
and never mutates its input.  Registers are capped at 10 qubits, which
is enough for every protocol in this suite (the largest register is an
8-party W state).  Measured qubits are removed from the register, so
protocol code only ever indexes surviving labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Iterable, Optional, Sequence, Union

import numpy as np

MAX_QUBITS = 10

# Measurement basis: "z", "x", or a float angle alpha meaning the basis
# {|+_a>, |-_a>} with |+-_a> = (|0> +- e^{i a}|1>)/sqrt(2).  Outcome 0
# corresponds to the |+_a> projector; "x" is alpha = 0.
Basis = Union[str, float]

_SQRT2 = math.sqrt(2.0)

X_MATRIX = np.array([[0, 1], [1, 0]], dtype=complex)
Y_MATRIX = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z_MATRIX = np.array([[1, 0], [0, -1]], dtype=complex)
H_MATRIX = np.array([[1, 1], [1, -1]], dtype=complex) / _SQRT2
CZ_MATRIX = np.diag([1, 1, 1, -1]).astype(complex)
CNOT_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def rot_z_matrix(alpha: float) -> np.ndarray:
    """Phase rotation about Z: diag(1, e^{i alpha})."""
    return np.diag([1.0, np.exp(1j * alpha)]).astype(complex)


@dataclass(frozen=True)
class BlochAngles:
    """Polar/azimuthal angles of a pure single-qubit state."""

    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must be in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi < 2.0 * math.pi:
            raise ValueError(f"phi must be in [0, 2*pi), got {self.phi}")


@dataclass(frozen=True)
class Gate:
    """A named unitary acting on one or two register labels."""

    kind: str  # X | Z | H | CZ | CNOT | ROTZ
    targets: tuple
    alpha: Optional[float] = None

    def matrix(self) -> np.ndarray:
        table = {
            "X": X_MATRIX,
            "Z": Z_MATRIX,
            "H": H_MATRIX,
            "CZ": CZ_MATRIX,
            "CNOT": CNOT_MATRIX,
        }
        if self.kind == "ROTZ":
            if self.alpha is None:
                raise ValueError("ROTZ gate needs an angle")
            return rot_z_matrix(self.alpha)
        if self.kind not in table:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        return table[self.kind]


@dataclass
class DensityState:
    """Density matrix over an ordered tuple of qubit labels.

    ``labels[0]`` is the most significant bit of the computational-basis
    index, so basis state |b0 b1 ... b_{n-1}> sits at row/column
    sum_i b_i << (n-1-i).
    """

    labels: tuple
    matrix: np.ndarray

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    def index(self, label: Hashable) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no qubit labeled {label!r} in register {self.labels}")

    def validate(self, atol: float = 1e-9) -> None:
        """Assert trace-1, Hermiticity and positivity (test helper)."""
        m = self.matrix
        if abs(np.trace(m) - 1.0) > atol:
            raise AssertionError(f"trace is {np.trace(m)}, not 1")
        if np.max(np.abs(m - m.conj().T)) > atol:
            raise AssertionError("matrix is not Hermitian")
        eigs = np.linalg.eigvalsh(m)
        if eigs.min() < -atol:
            raise AssertionError(f"negative eigenvalue {eigs.min()}")


def _default_labels(n: int) -> tuple:
    return tuple(range(n))


def init_register(n: int, labels: Optional[Sequence[Hashable]] = None) -> DensityState:
    """All-zeros register |0...0><0...0| on n qubits."""
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"qubit count must be in [1, {MAX_QUBITS}], got {n}")
    if labels is None:
        labels = _default_labels(n)
    labels = tuple(labels)
    if len(labels) != n or len(set(labels)) != n:
        raise ValueError("labels must be n distinct identifiers")
    dim = 2**n
    m = np.zeros((dim, dim), dtype=complex)
    m[0, 0] = 1.0
    return DensityState(labels, m)


def pure_state(vector: np.ndarray, labels: Sequence[Hashable]) -> DensityState:
    """Density matrix |v><v| from a normalized state vector."""
    v = np.asarray(vector, dtype=complex).ravel()
    n = len(tuple(labels))
    if v.shape[0] != 2**n:
        raise ValueError("vector length does not match label count")
    return DensityState(tuple(labels), np.outer(v, v.conj()))


def w_state(n_parties: int, labels: Optional[Sequence[Hashable]] = None) -> DensityState:
    """W state (1/sqrt(N)) sum_i |0..1_i..0> as a density matrix."""
    if not 2 <= n_parties <= MAX_QUBITS:
        raise ValueError(f"party count must be in [2, {MAX_QUBITS}], got {n_parties}")
    if labels is None:
        labels = _default_labels(n_parties)
    v = np.zeros(2**n_parties, dtype=complex)
    for i in range(n_parties):
        v[1 << (n_parties - 1 - i)] = 1.0 / math.sqrt(n_parties)
    return pure_state(v, labels)


def bloch_state(angles: BlochAngles, label: Hashable = 0) -> DensityState:
    """Pure state cos(t/2) e^{i phi/2}|0> + sin(t/2) e^{-i phi/2}|1>."""
    half_t = angles.theta / 2.0
    v = np.array(
        [
            math.cos(half_t) * np.exp(0.5j * angles.phi),
            math.sin(half_t) * np.exp(-0.5j * angles.phi),
        ],
        dtype=complex,
    )
    return pure_state(v, (label,))


def _apply_matrix(matrix: np.ndarray, n: int, u: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    """Conjugate an n-qubit density matrix by a 1- or 2-qubit unitary."""
    k = len(axes)
    t = matrix.reshape((2,) * (2 * n))
    uk = u.reshape((2,) * (2 * k))
    row_axes = list(axes)
    col_axes = [n + a for a in axes]
    # U rho: contract U's column indices with rho's row axes.
    t = np.tensordot(uk, t, axes=(list(range(k, 2 * k)), row_axes))
    t = np.moveaxis(t, list(range(k)), row_axes)
    # rho U^dagger: contract rho's column axes with conj(U)'s column indices.
    t = np.tensordot(t, uk.conj(), axes=(col_axes, list(range(k, 2 * k))))
    t = np.moveaxis(t, list(range(-k, 0)), col_axes)
    return t.reshape(matrix.shape)


def apply_unitary(state: DensityState, u: np.ndarray, targets: Sequence[Hashable]) -> DensityState:
    """rho -> U rho U^dagger on the given target labels."""
    targets = list(targets)
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate targets {targets}")
    axes = [state.index(t) for t in targets]
    if u.shape != (2 ** len(axes), 2 ** len(axes)):
        raise ValueError("unitary dimension does not match target count")
    return DensityState(state.labels, _apply_matrix(state.matrix, state.n_qubits, u, axes))


def apply_gate(state: DensityState, gate: Gate) -> DensityState:
    return apply_unitary(state, gate.matrix(), gate.targets)


def apply_kraus(state: DensityState, kraus: Iterable[np.ndarray], target: Hashable) -> DensityState:
    """Single-qubit channel rho -> sum_k K_k rho K_k^dagger on target."""
    axis = state.index(target)
    out = None
    for k in kraus:
        term = _apply_matrix(state.matrix, state.n_qubits, np.asarray(k, dtype=complex), [axis])
        out = term if out is None else out + term
    return DensityState(state.labels, out)


def _basis_rotation(basis: Basis) -> Optional[np.ndarray]:
    """Unitary mapping the measurement basis onto the Z basis (None for Z)."""
    if isinstance(basis, str):
        b = basis.lower()
        if b == "z":
            return None
        if b == "x":
            return H_MATRIX
        raise ValueError(f"unknown basis {basis!r}")
    # rotated basis |+-_alpha>: strip the phase, then Hadamard
    return H_MATRIX @ rot_z_matrix(-float(basis))


def project(
    state: DensityState, qubit: Hashable, basis: Basis, outcome: int
) -> tuple[float, Optional[DensityState]]:
    """Probability and collapsed state for a forced measurement outcome.

    The measured qubit is removed from the register.  Returns
    ``(prob, None)`` when the branch probability is below 1e-12.
    """
    if outcome not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    rot = _basis_rotation(basis)
    work = apply_unitary(state, rot, [qubit]) if rot is not None else state
    n = work.n_qubits
    axis = work.index(qubit)
    t = work.matrix.reshape((2,) * (2 * n))
    block = np.take(np.take(t, outcome, axis=n + axis), outcome, axis=axis)
    dim = 2 ** (n - 1)
    block = block.reshape((dim, dim))
    prob = float(np.trace(block).real)
    if prob < 1e-12:
        return max(prob, 0.0), None
    new_labels = tuple(l for l in work.labels if l != qubit)
    return prob, DensityState(new_labels, block / prob)


def measure(
    state: DensityState, qubit: Hashable, basis: Basis, rng: np.random.Generator
) -> tuple[int, DensityState]:
    """Sample a projective measurement; collapse and drop the qubit.

    Outcome 0 corresponds to |0> (Z basis) or |+_alpha> (rotated basis).
    """
    p0, collapsed0 = project(state, qubit, basis, 0)
    if collapsed0 is None:
        outcome = 1
    elif p0 > 1.0 - 1e-12:
        outcome = 0
    else:
        outcome = 0 if rng.random() < p0 else 1
    if outcome == 0:
        return 0, collapsed0
    _, collapsed1 = project(state, qubit, basis, 1)
    if collapsed1 is None:
        raise RuntimeError("both measurement branches have vanishing probability")
    return 1, collapsed1


def tensor_product(a: DensityState, b: DensityState) -> DensityState:
    """Combine two registers; a's qubits become the most significant."""
    overlap = set(a.labels) & set(b.labels)
    if overlap:
        raise ValueError(f"registers share labels {overlap}")
    if len(a.labels) + len(b.labels) > MAX_QUBITS:
        raise ValueError("combined register exceeds the qubit cap")
    return DensityState(a.labels + b.labels, np.kron(a.matrix, b.matrix))


def partial_trace(state: DensityState, keep: Iterable[Hashable]) -> DensityState:
    """Reduced state on the kept labels (original register order)."""
    keep = set(keep)
    if not keep:
        raise ValueError("keep set must be nonempty")
    missing = keep - set(state.labels)
    if missing:
        raise KeyError(f"labels {missing} not in register")
    kept_axes = [i for i, l in enumerate(state.labels) if l in keep]
    if len(kept_axes) == state.n_qubits:
        return DensityState(state.labels, state.matrix.copy())
    n = state.n_qubits
    t = state.matrix.reshape((2,) * (2 * n))
    for i, l in reversed(list(enumerate(state.labels))):
        if l in keep:
            continue
        half = t.ndim // 2
        t = np.trace(t, axis1=i, axis2=half + i)
    new_labels = tuple(l for l in state.labels if l in keep)
    dim = 2 ** len(new_labels)
    return DensityState(new_labels, t.reshape((dim, dim)))


def fidelity(state: DensityState, target: DensityState) -> float:
    """Tr[rho |psi><psi|] against a pure target state."""
    if state.matrix.shape != target.matrix.shape:
        raise ValueError("dimension mismatch between state and target")
    tm = target.matrix
    if abs(np.trace(tm @ tm).real - 1.0) > 1e-6:
        raise ValueError("target state is not pure")
    f = float(np.trace(state.matrix @ tm).real)
    return min(max(f, 0.0), 1.0)


def purity(state: DensityState) -> float:
    return float(np.trace(state.matrix @ state.matrix).real)
