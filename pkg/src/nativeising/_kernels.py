"""Compiled Metropolis kernels."""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def metropolis_batch(h, couplings, temps, spins, uniforms):
    """Sequential-sweep single-spin-flip Metropolis, in place.

    spins: (replicas, n) int8; uniforms: (replicas, sweeps, n).
    A flip with energy change dE is taken when dE <= 0, or when T > 0 and
    the matching uniform is below exp(-dE / T).
    """
    replicas, n = spins.shape
    for r in range(replicas):
        s = spins[r]
        for k in range(temps.size):
            t = temps[k]
            for i in range(n):
                field = h[i]
                for j in range(n):
                    field += couplings[i, j] * s[j]
                de = -2.0 * s[i] * field
                if de <= 0.0:
                    s[i] = -s[i]
                elif t > 0.0 and uniforms[r, k, i] < np.exp(-de / t):
                    s[i] = -s[i]
