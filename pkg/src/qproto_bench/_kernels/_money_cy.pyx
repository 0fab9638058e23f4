# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cython banknote pair kernel: tight C loop over pre-drawn uniforms.

Mirrors _money_py.simulate_pair_block exactly (same expressions, same
comparisons) so both backends produce identical tallies from identical
random arrays.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef int[8][2] ENC_BASIS = [
    [0, 1], [0, 1], [0, 1], [0, 1], [1, 0], [1, 0], [1, 0], [1, 0]
]
cdef int[8][2] ENC_BIT = [
    [0, 0], [0, 1], [1, 0], [1, 1], [0, 0], [1, 0], [0, 1], [1, 1]
]


def simulate_pair_block(
    cnp.int64_t[::1] states,
    cnp.int64_t[::1] bases,
    double[:, ::1] u_out,
    double[:, ::1] u_flip,
    double gamma,
    double lam,
    double p1,
    double p2,
):
    """Tally one banknote block; see the pure-Python twin for semantics."""
    cdef Py_ssize_t n = states.shape[0]
    cdef Py_ssize_t i
    cdef int j, s, eb, ev, out, basis
    cdef double p0
    cdef double p_xz = 0.5 * (1.0 + gamma)
    cdef double p_xx0 = 0.5 * (1.0 + lam)
    cdef double p_xx1 = 0.5 * (1.0 - lam)
    cdef long n_valid = 0
    cdef long n_detected = 0

    with nogil:
        for i in range(n):
            s = <int> states[i]
            basis = <int> bases[i]
            for j in range(2):
                eb = ENC_BASIS[s][j]
                ev = ENC_BIT[s][j]
                if basis == 0:
                    if eb == 0:
                        p0 = 1.0 if ev == 0 else gamma
                    else:
                        p0 = p_xz
                else:
                    if eb == 0:
                        p0 = 0.5
                    else:
                        p0 = p_xx0 if ev == 0 else p_xx1
                out = 0 if u_out[i, j] < p0 else 1
                if out == 0:
                    if u_flip[i, j] < p1:
                        out = 1
                else:
                    if u_flip[i, j] < p2:
                        out = 0
                if eb == basis:
                    n_detected += 1
                    if out == ev:
                        n_valid += 1
    return int(n_valid), int(n_detected)
