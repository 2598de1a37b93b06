"""Compiled point-counting kernels.

The trace of Frobenius for y^2 + (a1 x + a3) y = x^3 + a2 x^2 + a4 x + a6
over F_p (p odd) is recovered from the completed square

    g(x) = 4 x^3 + b2 x^2 + 2 b4 x + b6,     a_p = -sum_x chi_p(g(x)),

where chi_p is the quadratic residue character.  The table of chi_p values
is shared by every curve in a batch, g is advanced by finite differences
(additions only), and four curves are interleaved per pass so the table
lookups overlap in flight.  All branches in the hot loop are predictable.
"""

import numpy as np
from numba import njit, prange

_LANES = 4


@njit(cache=True)
def _residue_table(p):
    tab = np.full(p, -1, dtype=np.int8)
    tab[0] = 0
    s = 0
    for x in range(1, (p - 1) // 2 + 1):
        s += 2 * x - 1
        if s >= p:
            s -= p
        tab[s] = 1
    return tab


@njit(cache=True)
def _traces_at(p, bcs, out, row):
    """a_p for every row of bcs = (n,3) array of (b2, b4, b6); p odd prime."""
    tab = _residue_table(p)
    d3 = 24 % p
    nc = bcs.shape[0]
    for base in range(0, nc, _LANES):
        v0 = bcs[base, 2] % p
        e0 = (4 + bcs[base, 0] + 2 * bcs[base, 1]) % p
        f0 = (24 + 2 * bcs[base, 0]) % p
        v1, e1, f1 = v0, e0, f0
        v2, e2, f2 = v0, e0, f0
        v3, e3, f3 = v0, e0, f0
        if base + 1 < nc:
            v1 = bcs[base + 1, 2] % p
            e1 = (4 + bcs[base + 1, 0] + 2 * bcs[base + 1, 1]) % p
            f1 = (24 + 2 * bcs[base + 1, 0]) % p
        if base + 2 < nc:
            v2 = bcs[base + 2, 2] % p
            e2 = (4 + bcs[base + 2, 0] + 2 * bcs[base + 2, 1]) % p
            f2 = (24 + 2 * bcs[base + 2, 0]) % p
        if base + 3 < nc:
            v3 = bcs[base + 3, 2] % p
            e3 = (4 + bcs[base + 3, 0] + 2 * bcs[base + 3, 1]) % p
            f3 = (24 + 2 * bcs[base + 3, 0]) % p
        a0 = 0
        a1 = 0
        a2 = 0
        a3 = 0
        for _ in range(p):
            a0 += tab[v0]
            a1 += tab[v1]
            a2 += tab[v2]
            a3 += tab[v3]
            v0 += e0
            if v0 >= p:
                v0 -= p
            e0 += f0
            if e0 >= p:
                e0 -= p
            f0 += d3
            if f0 >= p:
                f0 -= p
            v1 += e1
            if v1 >= p:
                v1 -= p
            e1 += f1
            if e1 >= p:
                e1 -= p
            f1 += d3
            if f1 >= p:
                f1 -= p
            v2 += e2
            if v2 >= p:
                v2 -= p
            e2 += f2
            if e2 >= p:
                e2 -= p
            f2 += d3
            if f2 >= p:
                f2 -= p
            v3 += e3
            if v3 >= p:
                v3 -= p
            e3 += f3
            if e3 >= p:
                e3 -= p
            f3 += d3
            if f3 >= p:
                f3 -= p
        out[row, base] = -a0
        if base + 1 < nc:
            out[row, base + 1] = -a1
        if base + 2 < nc:
            out[row, base + 2] = -a2
        if base + 3 < nc:
            out[row, base + 3] = -a3


@njit(cache=True, parallel=True)
def trace_batch(primes, bcs):
    """a_p matrix (len(primes), len(bcs)); primes odd, good for every curve."""
    out = np.empty((len(primes), bcs.shape[0]), dtype=np.int64)
    for i in prange(len(primes)):
        _traces_at(primes[i], bcs, out, i)
    return out
