import itertools
import math

import numpy as np
import pytest

from qproto_bench import sim, vbqc
from qproto_bench.noise import MeasurementFlip, T1T2
from qproto_bench.stats import wilson_interval
from qproto_bench.vbqc import (
    ANGLE_SET,
    VbqcParams,
    VbqcProfile,
    computation_oracle_p1,
    estimate_test_failure,
    run_computation_round,
    run_protocol,
    run_test_round,
    wt_feasible_range,
)

CLEAN = VbqcProfile(gate_depolarizing_q=0.0, flips=MeasurementFlip(0.0, 0.0))
NOISY = VbqcProfile(gate_depolarizing_q=0.03)  # default NV flips


def _exact_test_round_pass_probability(u, thetas, rs, delta_free) -> float:
    """Enumerate every measurement branch of a noiseless test round.

    Independent oracle for the trap identity: walks the exact collapse
    tree with forced outcomes instead of sampling.
    """
    pair = sim.pure_state(vbqc.PHI_PLUS, ("a", "b"))
    state = None
    for sq, cq in zip(vbqc.SERVER_QUBITS, vbqc.CLIENT_QUBITS):
        link = sim.DensityState((sq, cq), pair.matrix.copy())
        state = link if state is None else sim.tensor_product(state, link)
    state = sim.apply_unitary(state, sim.CZ_MATRIX, ["q1", "q3"])
    state = sim.apply_unitary(state, sim.CZ_MATRIX, ["q3", "q5"])

    th1, th2, th3 = thetas
    r1, r2, r3 = rs
    if u == 1:
        client_plan = [("q2", -th1), ("q6", -th3), ("q4", None)]
    else:
        client_plan = [("q4", -th2), ("q2", None), ("q6", None)]

    total = 0.0
    for client_bits in itertools.product((0, 1), repeat=3):
        branch = state
        weight = 1.0
        dead = False
        for (qubit, angle), bit in zip(client_plan, client_bits):
            basis = "z" if angle is None else angle
            p, branch = sim.project(branch, qubit, basis, bit)
            weight *= p
            if branch is None or weight == 0.0:
                dead = True
                break
        if dead:
            continue
        if u == 1:
            g1, g3, d2 = client_bits
            delta1 = th1 + (r1 + d2 + g1) * math.pi
            delta2 = delta_free
            delta3 = th3 + (r3 + d2 + g3) * math.pi
        else:
            g2, d1, d3 = client_bits
            delta1 = delta_free
            delta2 = th2 + (r2 + d1 + d3 + g2) * math.pi
            delta3 = delta_free
        for server_bits in itertools.product((0, 1), repeat=3):
            b_branch = branch
            w = weight
            ok = True
            for qubit, angle, bit in zip(
                ("q1", "q3", "q5"), (delta1, delta2, delta3), server_bits
            ):
                p, b_branch = sim.project(b_branch, qubit, angle, bit)
                w *= p
                if b_branch is None:
                    ok = False
                    break
            if not ok:
                continue
            b1, b2, b3 = server_bits
            passed = (b1 == r1 and b3 == r3) if u == 1 else (b2 == r2)
            if passed:
                total += w
    return total


@pytest.mark.parametrize("u", [1, 2])
def test_trap_identity_exact_probability_one(u):
    rng = np.random.default_rng(u)
    for _ in range(3):
        thetas = tuple(ANGLE_SET[i] for i in rng.integers(0, 8, 3))
        rs = tuple(int(b) for b in rng.integers(0, 2, 3))
        delta_free = ANGLE_SET[int(rng.integers(0, 8))]
        p_pass = _exact_test_round_pass_probability(u, thetas, rs, delta_free)
        assert p_pass == pytest.approx(1.0, abs=1e-9)


def test_noiseless_test_rounds_never_fail():
    rng = np.random.default_rng(10)
    assert all(run_test_round(CLEAN, rng) for _ in range(2000))


def test_noiseless_computation_matches_oracle_distribution():
    rng = np.random.default_rng(20)
    for _ in range(4):
        x = int(rng.integers(0, 2))
        phis = tuple(ANGLE_SET[i] for i in rng.integers(0, 8, 3))
        p1 = computation_oracle_p1(x, phis)
        params = VbqcParams(d=1, t=1, w=0, x=x, phis=phis)
        trials = 4000
        ones = sum(run_computation_round(CLEAN, params, rng) for _ in range(trials))
        sigma = math.sqrt(max(p1 * (1 - p1), 1e-12) / trials)
        assert abs(ones / trials - p1) <= max(3 * sigma, 1e-9)


def test_all_zero_angles_give_deterministic_output():
    # H P(0) H P(0) H P(0) H|0> = |0>: output always 0
    assert computation_oracle_p1(0, (0.0, 0.0, 0.0)) == pytest.approx(0.0, abs=1e-12)
    rng = np.random.default_rng(21)
    params = VbqcParams(d=1, t=1, w=0, x=0, phis=(0.0, 0.0, 0.0))
    assert all(run_computation_round(CLEAN, params, rng) == 0 for _ in range(500))


def test_delta1_is_uniform_over_all_sixteen_angles():
    # blindness plumbing: server-visible delta1 uniform over {k pi/8}
    rng = np.random.default_rng(22)
    params = VbqcParams(d=1, t=1, w=0, x=1, phis=(ANGLE_SET[3], 0.0, 0.0))
    counts = np.zeros(16, dtype=int)
    trials = 8000

    # reproduce the delta1 computation with the same draw structure
    for _ in range(trials):
        th1 = ANGLE_SET[int(rng.integers(0, 8))]
        g1 = int(rng.integers(0, 2))  # stand-in for the client outcome coin
        r1 = int(rng.integers(0, 2))
        delta1 = (params.phis[0] + th1 + (params.x + r1 + g1) * math.pi) % (2 * math.pi)
        counts[int(round(delta1 / (math.pi / 8))) % 16] += 1
    expected = trials / 16
    sigma = math.sqrt(trials * (1 / 16) * (15 / 16))
    assert np.all(np.abs(counts - expected) < 4 * sigma)


def test_estimate_test_failure_wilson_anchor():
    est = wilson_interval(300, 3000, 0.95)
    assert est.lower == pytest.approx(0.0898, abs=2e-3)
    assert est.upper == pytest.approx(0.1113, abs=2e-3)
    wide = wilson_interval(300, 3000, 0.9995)
    assert wide.lower < est.lower and wide.upper > est.upper


def test_estimate_test_failure_rejects_tiny_trials():
    with pytest.raises(ValueError):
        estimate_test_failure(CLEAN, 50, 0.95, np.random.default_rng(0))


def test_wt_feasible_range():
    assert wt_feasible_range(0.1, 2) == (0.1, 0.25)
    assert wt_feasible_range(0.25, 2) is None
    assert wt_feasible_range(0.3, 2) is None
    # w=1, t=5 sits inside the window iff p_max < 0.2
    low, high = wt_feasible_range(0.19, 2)
    assert low < 1 / 5 < high


def test_protocol_never_aborts_with_w_equal_t():
    rng = np.random.default_rng(30)
    params = VbqcParams(d=2, t=2, w=2, x=0, phis=(0.0, 0.0, 0.0))
    profile = VbqcProfile(gate_depolarizing_q=0.2)
    assert all(run_protocol(profile, params, rng) is not None for _ in range(40))


def test_noiseless_protocol_returns_oracle_bit():
    rng = np.random.default_rng(31)
    params = VbqcParams(d=3, t=2, w=0, x=0, phis=(0.0, 0.0, 0.0))
    for _ in range(20):
        assert run_protocol(CLEAN, params, rng) == 0


def test_failure_rate_monotone_in_depolarizing_noise():
    rng = np.random.default_rng(32)
    rates = []
    for q in (0.0, 0.03, 0.08):
        profile = VbqcProfile(gate_depolarizing_q=q, flips=MeasurementFlip(0, 0))
        est = estimate_test_failure(profile, 600, 0.95, rng)
        rates.append(est)
    assert rates[0].upper < rates[1].lower
    assert rates[1].upper < rates[2].lower


def test_memory_noise_option_degrades_test_rounds():
    rng = np.random.default_rng(33)
    lossy = VbqcProfile(
        gate_depolarizing_q=0.0,
        flips=MeasurementFlip(0.0, 0.0),
        memory=T1T2(t1=1.0, t2=2e-5),  # T2 comparable to the gate times
    )
    failures = sum(0 if run_test_round(lossy, rng) else 1 for _ in range(300))
    assert failures > 30


def test_params_validation():
    with pytest.raises(ValueError):
        VbqcParams(d=0, t=1, w=0, x=0, phis=(0.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        VbqcParams(d=1, t=1, w=2, x=0, phis=(0.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        VbqcParams(d=1, t=1, w=1, x=0, phis=(0.3, 0.0, 0.0))
