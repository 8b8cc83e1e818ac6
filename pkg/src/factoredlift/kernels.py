"""Backend selection for the group-algebra matrix product.

The compiled core (``_ckernels``) is used when it was built; otherwise the
numpy fallback in ``_kernels_py`` is used. Setting the environment variable
``FACTOREDLIFT_PURE_PYTHON=1`` forces the fallback.

Integer inputs stay exact: int64 is used while a worst-case bound on the
output coefficients fits, and Python ``int`` (object arrays) beyond that.
"""

import os

import numpy as np

from . import _kernels_py

_compiled = None
if os.environ.get("FACTOREDLIFT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"

_INT64_SAFE = 2**62


def available_backends():
    return ["cython", "python"] if _compiled is not None else ["python"]


def _result_dtype(A, B):
    if A.dtype == object or B.dtype == object:
        return object
    if np.issubdtype(A.dtype, np.complexfloating) or np.issubdtype(B.dtype, np.complexfloating):
        return np.complex128
    if np.issubdtype(A.dtype, np.floating) or np.issubdtype(B.dtype, np.floating):
        return np.complex128
    return np.int64


def ga_matmul(A, B, mult, backend=None):
    """Product of two matrices over the group algebra.

    ``A`` has shape (k, m, n) and ``B`` shape (m, p, n): entry [u, w, g] is
    the coefficient of group element g in the (u, w) entry. ``mult`` is the
    n x n multiplication table with the identity at index 0.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    if A.ndim != 3 or B.ndim != 3 or A.shape[1] != B.shape[0] or A.shape[2] != B.shape[2]:
        raise ValueError(f"incompatible shapes {A.shape} and {B.shape}")
    k, m, n = A.shape
    p = B.shape[1]
    mult = np.ascontiguousarray(mult, dtype=np.int64)
    dtype = _result_dtype(A, B)

    if dtype is np.int64:
        amax = int(np.abs(A).max(initial=0))
        bmax = int(np.abs(B).max(initial=0))
        if amax * bmax * max(m, 1) * n >= _INT64_SAFE:
            dtype = object

    if dtype is object:
        # astype(object) yields Python ints, which never overflow
        A_ = A.astype(np.int64).astype(object) if A.dtype != object else A
        B_ = B.astype(np.int64).astype(object) if B.dtype != object else B
        out = np.zeros((k, p, n), dtype=np.int64).astype(object)
        return _kernels_py.ga_matmul_into(A_, B_, mult, out)

    A_ = np.ascontiguousarray(A, dtype=dtype)
    B_ = np.ascontiguousarray(B, dtype=dtype)
    out = np.zeros((k, p, n), dtype=dtype)
    use = backend or BACKEND
    if use == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available")
        _compiled.ga_matmul_into(A_, B_, mult, out)
        return out
    if use != "python":
        raise ValueError(f"unknown backend {use!r}")
    return _kernels_py.ga_matmul_into(A_, B_, mult, out)
