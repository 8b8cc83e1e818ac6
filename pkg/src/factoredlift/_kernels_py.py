"""Pure numpy implementation of the hot kernels (fallback for the Cython core)."""

import numpy as np


def ga_matmul_into(A, B, mult, out):
    # out[u, v, t] = sum_g sum_w A[u, w, g] * B[w, v, g^-1 t]
    n = mult.shape[0]
    inv = np.argmin(mult, axis=1)  # identity has index 0
    ldiv = mult[inv]
    for g in range(n):
        Ag = A[:, :, g]
        if not Ag.any():
            continue
        out += np.tensordot(Ag, B[:, :, ldiv[g]], axes=(1, 0))
    return out
