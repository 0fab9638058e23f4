"""Pure-numpy banknote pair kernel (fallback for the Cython version).

Both implementations consume identical pre-drawn random arrays and use
identical floating-point expressions, so tallies are bit-for-bit equal
whichever backend is active.
"""

from __future__ import annotations

import numpy as np

# Pair state table, index 0..7:
# |0+> |0-> |1+> |1-> |+0> |-0> |+1> |-1>
# Per qubit: encoding basis (0 = Z, 1 = X) and encoded bit.
ENC_BASIS = np.array(
    [[0, 1], [0, 1], [0, 1], [0, 1], [1, 0], [1, 0], [1, 0], [1, 0]], dtype=np.int8
)
ENC_BIT = np.array(
    [[0, 0], [0, 1], [1, 0], [1, 1], [0, 0], [1, 0], [0, 1], [1, 1]], dtype=np.int8
)


def simulate_pair_block(
    states: np.ndarray,
    bases: np.ndarray,
    u_out: np.ndarray,
    u_flip: np.ndarray,
    gamma: float,
    lam: float,
    p1: float,
    p2: float,
) -> tuple[int, int]:
    """Tally one banknote block of qubit pairs.

    states: (n,) ints in [0, 8) choosing the pair from the table above.
    bases: (n,) verifier basis per pair (0 = Z, 1 = X).
    u_out, u_flip: (n, 2) uniforms driving Born sampling and readout flips.
    gamma: amplitude-damping probability 1 - exp(-T/T1) for the wait.
    lam: total off-diagonal decay factor exp(-T/T2).

    Returns (n_valid, n_detected); only qubits encoded in the chosen
    basis are counted, so n_detected equals the number of pairs.
    """
    enc_basis = ENC_BASIS[states]
    enc_bit = ENC_BIT[states]
    basis_col = bases[:, None]
    # Born probabilities of the pre-flip outcome 0 after T1/T2 storage.
    p0_z = np.where(
        enc_basis == 0,
        np.where(enc_bit == 0, 1.0, gamma),
        0.5 * (1.0 + gamma),
    )
    p0_x = np.where(
        enc_basis == 0,
        0.5,
        np.where(enc_bit == 0, 0.5 * (1.0 + lam), 0.5 * (1.0 - lam)),
    )
    p0 = np.where(basis_col == 0, p0_z, p0_x)
    out = np.where(u_out < p0, 0, 1).astype(np.int8)
    final = np.where(
        (out == 0) & (u_flip < p1), 1, np.where((out == 1) & (u_flip < p2), 0, out)
    )
    counted = enc_basis == basis_col
    n_detected = int(np.count_nonzero(counted))
    n_valid = int(np.count_nonzero(counted & (final == enc_bit)))
    return n_valid, n_detected
