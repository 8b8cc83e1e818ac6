"""Compare the compiled and numpy group-algebra matrix products.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from factoredlift import kernels
from factoredlift.groups import cyclic_group, dihedral_group, direct_product


def random_operands(rng, k, n, density, dtype):
    shape = (k, k, n)
    mask = rng.random(shape) < density
    if dtype is np.int64:
        vals = rng.integers(-3, 4, size=shape)
    else:
        vals = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return np.where(mask, vals, 0).astype(dtype)


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    cases = [
        ("Z12", cyclic_group(12), 5, 0.3),
        ("D6", dihedral_group(6), 5, 0.3),
        ("D16", dihedral_group(16), 8, 0.2),
        ("Z2xD12", direct_product([cyclic_group(2), dihedral_group(12)]), 10, 0.1),
        ("Z64", cyclic_group(64), 16, 0.05),
    ]
    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)} (default {kernels.BACKEND})")
    print(f"{'group':>8} {'k':>3} {'dtype':>8} " + " ".join(f"{b + ' ms':>12}" for b in backends) + "   speedup")
    for name, G, k, density in cases:
        for dtype in (np.int64, np.complex128):
            A = random_operands(rng, k, G.order, density, dtype)
            B = random_operands(rng, k, G.order, density, dtype)
            ref = kernels.ga_matmul(A, B, G.mult, backend="python")
            times = {}
            for b in backends:
                out = kernels.ga_matmul(A, B, G.mult, backend=b)
                assert np.allclose(out, ref), f"{b} disagrees with python on {name}"
                times[b] = best_time(lambda: kernels.ga_matmul(A, B, G.mult, backend=b), args.repeat)
            cols = " ".join(f"{1e3 * times[b]:12.3f}" for b in backends)
            speed = f"{times['python'] / times['cython']:8.1f}x" if "cython" in times else ""
            print(f"{name:>8} {k:>3} {np.dtype(dtype).name:>8} {cols}  {speed}")


if __name__ == "__main__":
    main()
