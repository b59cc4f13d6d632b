"""Timing comparison of the compiled and pure-numpy kernel backends.

Run with: python benchmarks/bench_kernels.py
The numba backend can also be disabled globally via DRIFTLAB_DISABLE_NUMBA=1.
"""

import time

import numpy as np

from driftlab import _kernels
from driftlab.backend import HAVE_NUMBA


def _time(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_bmo(backend):
    rng = np.random.Generator(np.random.PCG64(1))
    v = rng.standard_normal((128, 128))
    return _time(lambda: _kernels.bmo_oscillation(v, 0.125, stride=4, backend=backend))


def bench_singular(backend):
    rng = np.random.Generator(np.random.PCG64(2))
    v = rng.standard_normal(512)
    K = np.abs(np.fft.fftfreq(512)) + 0.1
    return _time(lambda: _kernels.singular_kernel_apply(v, K, 1.0 / 512, backend=backend))


def bench_holder(backend):
    rng = np.random.Generator(np.random.PCG64(3))
    v = rng.standard_normal(1024)
    return _time(lambda: _kernels.holder_pair_max(v, 0.3, backend=backend))


def main():
    rows = [
        ("bmo_oscillation 128x128", bench_bmo),
        ("singular_kernel_apply N=512", bench_singular),
        ("holder_pair_max N=1024", bench_holder),
    ]
    print(f"numba available: {HAVE_NUMBA}")
    header = f"{'kernel':<32} {'numpy (s)':>12} {'numba (s)':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, fn in rows:
        t_np = fn("numpy")
        if HAVE_NUMBA:
            fn("numba")  # warm up the jit compile
            t_nb = fn("numba")
            print(f"{name:<32} {t_np:>12.5f} {t_nb:>12.5f} {t_np / t_nb:>8.1f}x")
        else:
            print(f"{name:<32} {t_np:>12.5f} {'-':>12} {'-':>9}")


if __name__ == "__main__":
    main()
