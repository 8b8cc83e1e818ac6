# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled group-algebra matrix product.

out[u, v, mult[g, h]] += A[u, w, g] * B[w, v, h]
"""

from libc.stdint cimport int64_t

ctypedef fused coeff_t:
    int64_t
    double complex


def ga_matmul_into(const coeff_t[:, :, ::1] A, const coeff_t[:, :, ::1] B,
                   const int64_t[:, ::1] mult, coeff_t[:, :, ::1] out):
    cdef Py_ssize_t k = A.shape[0], m = A.shape[1], n = A.shape[2]
    cdef Py_ssize_t p = B.shape[1]
    cdef Py_ssize_t u, w, g, v, h
    cdef coeff_t a, b
    with nogil:
        for u in range(k):
            for w in range(m):
                for g in range(n):
                    a = A[u, w, g]
                    if a == 0:
                        continue
                    for v in range(p):
                        for h in range(n):
                            b = B[w, v, h]
                            if b != 0:
                                out[u, v, mult[g, h]] += a * b
