"""Benchmark the numba and numpy lanes of the hot kernels.

Times the Cayley-table identity scans and the batched octonion product on
both code paths, after a warmup call so JIT compilation is excluded.

    python benchmarks/bench_kernels.py [--order 64] [--batch 200000] [--repeat 5]
"""

import argparse
import time

import numpy as np

from loopoid_lab import _kernels
from loopoid_lab._accel import HAVE_NUMBA, NUMBA_ENABLED
from loopoid_lab.octonion import MUL_INDEX, MUL_SIGN, MUL_TENSOR


def random_latin_square(n, rng):
    """Row-rotated base square shuffled by row/column/symbol permutations."""
    base = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
    rows = rng.permutation(n)
    cols = rng.permutation(n)
    syms = rng.permutation(n)
    return syms[base[rows][:, cols]].astype(np.int64)


def timeit(fn, repeat):
    fn()  # warmup (triggers compilation on the jit lane)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--order", type=int, default=64)
    parser.add_argument("--batch", type=int, default=200_000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    table = random_latin_square(args.order, rng)
    a = rng.normal(size=(args.batch, 8))
    b = rng.normal(size=(args.batch, 8))

    print(f"numba available: {HAVE_NUMBA}   enabled by flag: {NUMBA_ENABLED}")
    print(f"table order {args.order} (O(n^3) scans), octonion batch {args.batch}")
    print()
    print(f"{'kernel':<28}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")

    scans = [
        ("associative_scan", lambda use: _kernels.associative_scan(table, use_numba=use)),
        ("moufang_scan(form 0)", lambda use: _kernels.moufang_scan(table, 0, use_numba=use)),
        ("left_bol_scan", lambda use: _kernels.left_bol_scan(table, use_numba=use)),
        ("right_bol_scan", lambda use: _kernels.right_bol_scan(table, use_numba=use)),
        (
            "oct_mul_many",
            lambda use: _kernels.oct_mul_many(a, b, MUL_SIGN, MUL_INDEX, MUL_TENSOR, use_numba=use),
        ),
    ]
    for name, fn in scans:
        t_np = timeit(lambda: fn(False), args.repeat)
        if HAVE_NUMBA:
            t_nb = timeit(lambda: fn(True), args.repeat)
            print(f"{name:<28}{t_np * 1e3:>12.2f}{t_nb * 1e3:>12.2f}{t_np / t_nb:>10.1f}x")
        else:
            print(f"{name:<28}{t_np * 1e3:>12.2f}{'-':>12}{'-':>10}")

    # cross-check: both lanes agree on the counts/values
    for name, fn in scans[:-1]:
        assert fn(False) == fn(True), name
    assert np.allclose(
        _kernels.oct_mul_many(a[:100], b[:100], MUL_SIGN, MUL_INDEX, MUL_TENSOR, use_numba=False),
        _kernels.oct_mul_many(a[:100], b[:100], MUL_SIGN, MUL_INDEX, MUL_TENSOR, use_numba=True),
        atol=1e-12,
    )
    print("\nlanes agree on all outputs")


if __name__ == "__main__":
    main()
