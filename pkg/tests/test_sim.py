import math

import numpy as np
import pytest

from qproto_bench import sim
from qproto_bench.sim import BlochAngles, Gate

RNG = lambda seed=0: np.random.default_rng(seed)


def test_init_register_single_qubit():
    state = sim.init_register(1)
    assert np.allclose(state.matrix, np.diag([1.0, 0.0]))


def test_init_register_two_qubits():
    state = sim.init_register(2)
    expected = np.zeros((4, 4))
    expected[0, 0] = 1.0
    assert np.allclose(state.matrix, expected)


@pytest.mark.parametrize("n", [0, 11, -1])
def test_init_register_rejects_bad_sizes(n):
    with pytest.raises(ValueError):
        sim.init_register(n)


def test_w_state_two_parties_is_psi_plus():
    state = sim.w_state(2)
    psi = np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2)
    assert np.allclose(state.matrix, np.outer(psi, psi.conj()), atol=1e-12)


def test_w_state_four_party_amplitudes():
    state = sim.w_state(4)
    for i in range(4):
        idx = 1 << (3 - i)
        assert state.matrix[idx, idx] == pytest.approx(0.25, abs=1e-12)


@pytest.mark.parametrize("n", [1, 11])
def test_w_state_rejects_bad_sizes(n):
    with pytest.raises(ValueError):
        sim.w_state(n)


def test_w_state_postselection_probability_is_2_over_n():
    # measure N-2 qubits in Z, post-select all-zero: success 2/N
    n = 4
    rng = RNG(3)
    hits = 0
    trials = 4000
    for _ in range(trials):
        state = sim.w_state(n)
        ok = True
        for label in range(2, n):
            bit, state = sim.measure(state, label, "z", rng)
            if bit != 0:
                ok = False
                break
        hits += ok
    p = hits / trials
    sigma = math.sqrt(0.5 * 0.5 / trials)
    assert abs(p - 2 / n) < 3 * sigma


def test_apply_gate_x_flips_zero():
    state = sim.init_register(1)
    out = sim.apply_gate(state, Gate("X", (0,)))
    assert np.allclose(out.matrix, np.diag([0.0, 1.0]))


def test_hadamard_is_involution():
    rng = RNG(1)
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    v /= np.linalg.norm(v)
    state = sim.pure_state(v, (0, 1))
    out = sim.apply_gate(state, Gate("H", (1,)))
    out = sim.apply_gate(out, Gate("H", (1,)))
    assert np.max(np.abs(out.matrix - state.matrix)) < 1e-12


def test_cz_on_plus_plus_matches_direct_matrix_computation():
    # independent oracle: explicit 4x4 kron arithmetic
    plus = np.array([1, 1], dtype=complex) / math.sqrt(2)
    psi = np.kron(plus, plus)
    cz = np.diag([1, 1, 1, -1]).astype(complex)
    expected = np.outer(cz @ psi, (cz @ psi).conj())

    state = sim.pure_state(np.kron(plus, plus), ("a", "b"))
    out = sim.apply_gate(state, Gate("CZ", ("a", "b")))
    assert np.max(np.abs(out.matrix - expected)) < 1e-12
    # graph state: each reduced qubit is maximally mixed
    for keep in ("a", "b"):
        red = sim.partial_trace(out, {keep})
        assert np.allclose(red.matrix, np.eye(2) / 2, atol=1e-12)


def test_apply_gate_trace_preserved():
    state = sim.w_state(3)
    out = sim.apply_gate(state, Gate("CNOT", (0, 2)))
    assert abs(np.trace(out.matrix) - 1.0) < 1e-12


def test_apply_gate_rejects_duplicate_targets():
    state = sim.init_register(2)
    with pytest.raises(ValueError):
        sim.apply_gate(state, Gate("CZ", (0, 0)))


def test_apply_gate_rejects_unknown_label():
    state = sim.init_register(2)
    with pytest.raises(KeyError):
        sim.apply_gate(state, Gate("X", ("nope",)))


@pytest.mark.parametrize(
    "kind,alpha",
    [("X", None), ("Z", None), ("H", None), ("CZ", None), ("CNOT", None), ("ROTZ", 0.7)],
)
def test_gate_matrices_are_unitary(kind, alpha):
    targets = (0, 1) if kind in ("CZ", "CNOT") else (0,)
    u = Gate(kind, targets, alpha).matrix()
    assert np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) < 1e-12


def test_measure_zero_state_is_deterministic():
    bit, rest = sim.measure(sim.init_register(2), 0, "z", RNG())
    assert bit == 0
    assert rest.labels == (1,)


def test_measure_rotated_eigenstate_is_deterministic():
    alpha = 1.234
    v = np.array([1.0, np.exp(1j * alpha)]) / math.sqrt(2)
    state = sim.pure_state(v, ("q",))
    bit, _ = sim.measure(state, "q", alpha, RNG())
    assert bit == 0


def test_measure_x_on_zero_is_uniform():
    rng = RNG(11)
    trials = 10_000
    ones = sum(sim.measure(sim.init_register(1), 0, "x", rng)[0] for _ in range(trials))
    assert abs(ones / trials - 0.5) < 0.02


def test_measure_born_statistics_match_amplitudes():
    # 3 sigma binomial check on a biased state
    angles = BlochAngles(1.1, 0.4)
    p1 = math.sin(1.1 / 2) ** 2
    rng = RNG(5)
    trials = 100_000
    ones = sum(
        sim.measure(sim.bloch_state(angles), 0, "z", rng)[0] for _ in range(trials)
    )
    sigma = math.sqrt(p1 * (1 - p1) / trials)
    assert abs(ones / trials - p1) < 3 * sigma


def test_project_returns_none_for_impossible_branch():
    prob, collapsed = sim.project(sim.init_register(1), 0, "z", 1)
    assert prob == 0.0
    assert collapsed is None


@pytest.mark.parametrize(
    "theta,phi,expected",
    [
        (0.0, 0.0, np.diag([1.0, 0.0])),
        (math.pi, 0.0, np.diag([0.0, 1.0])),
        (math.pi / 2, 0.0, np.full((2, 2), 0.5)),
    ],
)
def test_bloch_state_poles_and_equator(theta, phi, expected):
    state = sim.bloch_state(BlochAngles(theta, phi))
    assert np.allclose(state.matrix, expected, atol=1e-12)


def test_bloch_angles_validate_ranges():
    with pytest.raises(ValueError):
        BlochAngles(-0.1, 0.0)
    with pytest.raises(ValueError):
        BlochAngles(0.5, 7.0)


def test_fidelity_of_state_with_itself():
    state = sim.w_state(2)
    assert sim.fidelity(state, state) == pytest.approx(1.0, abs=1e-12)


def test_fidelity_of_maximally_mixed_vs_bell():
    mixed = sim.DensityState((0, 1), np.eye(4, dtype=complex) / 4)
    assert sim.fidelity(mixed, sim.w_state(2)) == pytest.approx(0.25, abs=1e-12)


def test_fidelity_rejects_dimension_mismatch():
    with pytest.raises(ValueError):
        sim.fidelity(sim.init_register(1), sim.init_register(2))


def test_fidelity_rejects_mixed_target():
    mixed = sim.DensityState((0,), np.eye(2, dtype=complex) / 2)
    with pytest.raises(ValueError):
        sim.fidelity(sim.init_register(1), mixed)


def test_partial_trace_of_bell_pair_is_mixed():
    red = sim.partial_trace(sim.w_state(2), {0})
    assert np.allclose(red.matrix, np.eye(2) / 2, atol=1e-12)


def test_partial_trace_keep_all_is_identity():
    state = sim.w_state(3)
    out = sim.partial_trace(state, {0, 1, 2})
    assert np.allclose(out.matrix, state.matrix, atol=1e-15)


def test_partial_trace_of_product_state():
    out = sim.partial_trace(sim.init_register(2), {0})
    assert np.allclose(out.matrix, np.diag([1.0, 0.0]), atol=1e-15)


def test_partial_trace_rejects_empty_keep():
    with pytest.raises(ValueError):
        sim.partial_trace(sim.w_state(2), set())


def test_tensor_product_and_label_collision():
    a = sim.init_register(1, labels=("a",))
    b = sim.init_register(1, labels=("b",))
    joint = sim.tensor_product(a, b)
    assert joint.labels == ("a", "b")
    with pytest.raises(ValueError):
        sim.tensor_product(a, a)


def test_operations_preserve_density_invariants():
    rng = RNG(7)
    state = sim.w_state(4)
    state = sim.apply_gate(state, Gate("H", (0,)))
    state = sim.apply_gate(state, Gate("CZ", (1, 2)))
    state = sim.apply_gate(state, Gate("ROTZ", (3,), 0.9))
    _, state = sim.measure(state, 2, "x", rng)
    state.validate(atol=1e-9)


def test_bloch_grid_states_are_pure():
    # all 6400 integration grid points: trace-1 pure states
    from qproto_bench.stats import sphere_grid

    for theta, phi in sphere_grid():
        state = sim.bloch_state(BlochAngles(theta, phi))
        assert abs(np.trace(state.matrix) - 1.0) < 1e-9
        assert abs(sim.purity(state) - 1.0) < 1e-9


def test_measurements_on_disjoint_qubits_commute():
    # exact check: projecting two different qubits in either order gives
    # the same joint probability and post-measurement state
    state = sim.w_state(3)
    state = sim.apply_gate(state, Gate("CZ", (0, 1)))
    for basis_a, basis_b in (("z", "x"), (0.6, "z"), (1.1, 0.3)):
        for bit_a, bit_b in [(0, 0), (0, 1), (1, 0)]:
            p1, s1 = sim.project(state, 0, basis_a, bit_a)
            if s1 is not None:
                p1b, s1 = sim.project(s1, 1, basis_b, bit_b)
                p_ab = p1 * p1b
            else:
                p_ab, s1 = 0.0, None
            p2, s2 = sim.project(state, 1, basis_b, bit_b)
            if s2 is not None:
                p2b, s2 = sim.project(s2, 0, basis_a, bit_a)
                p_ba = p2 * p2b
            else:
                p_ba, s2 = 0.0, None
            assert p_ab == pytest.approx(p_ba, abs=1e-12)
            if s1 is not None and s2 is not None:
                assert np.max(np.abs(s1.matrix - s2.matrix)) < 1e-9
