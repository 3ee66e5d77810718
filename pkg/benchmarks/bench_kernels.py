"""Timing comparison of the compiled kernel extension against the numpy
fallback.

Run from the repository root after an editable install:

    python3 benchmarks/bench_kernels.py [--nhat 1024] [--ell 4096] [--repeat 5]

Both backends produce bit-identical output, so the interesting number is
the speed ratio. Each kernel is timed over the best of `repeat` passes
on the same inputs.
"""

import argparse
import time

import numpy as np

from eastplus.backends import available_backends


def _best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--nhat", type=int, default=1024, help="column count")
    parser.add_argument("--ell", type=int, default=4096, help="row count")
    parser.add_argument("--repeat", type=int, default=5, help="passes per timing")
    parser.add_argument("--seeds", type=int, default=20000, help="matrix seeds for inner_products")
    args = parser.parse_args()

    rng = np.random.default_rng(7)
    g_cols = rng.uniform(0.02, 0.4, size=args.nhat)
    u = rng.normal(size=args.nhat)
    v = rng.normal(size=args.nhat)
    raw = rng.normal(size=args.ell)
    seeds = np.arange(args.seeds, dtype=np.uint64)

    backends = available_backends()
    names = [b.name for b in backends]
    print(f"backends: {', '.join(names)}")
    print(f"nhat={args.nhat} ell={args.ell} repeat={args.repeat} seeds={args.seeds}")
    print()

    cases = {
        "project": lambda k: k.project(42, args.ell, g_cols, u),
        "sketch_scatter": lambda k: k.sketch_scatter(42, 0, args.ell, g_cols, raw),
        "inner_products": lambda k: k.inner_products(seeds, 16, g_cols[:64], u[:64], v[:64]),
        "gen_block": lambda k: k.gen_block(42, 0, 256, g_cols),
    }

    header = f"{'kernel':<16}" + "".join(f"{n:>12}" for n in names)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for label, call in cases.items():
        timings = [_best_of(lambda k=k: call(k), args.repeat) for k in backends]
        row = f"{label:<16}" + "".join(f"{t * 1e3:>10.2f}ms" for t in timings)
        if len(timings) == 2:
            row += f"{timings[1] / timings[0]:>9.1f}x"
        print(row)

    if len(backends) == 2:
        a, b = backends
        checks = [
            np.array_equal(a.project(42, args.ell, g_cols, u), b.project(42, args.ell, g_cols, u)),
            np.array_equal(
                a.sketch_scatter(42, 0, args.ell, g_cols, raw),
                b.sketch_scatter(42, 0, args.ell, g_cols, raw),
            ),
            np.array_equal(
                a.inner_products(seeds[:100], 16, g_cols[:64], u[:64], v[:64]),
                b.inner_products(seeds[:100], 16, g_cols[:64], u[:64], v[:64]),
            ),
        ]
        print()
        print(f"bit-identical outputs: {all(checks)}")


if __name__ == "__main__":
    main()
