#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the majorization inner-loop primitives and a full projection at
several corpus sizes.  Run after building the extension:

    python benchmarks/bench_kernels.py [--sizes 100 300 600] [--repeats 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from evimap import _kernels_py

try:
    from evimap import _speedups
except ImportError:
    _speedups = None

BACKENDS = {"python": _kernels_py}
if _speedups is not None:
    BACKENDS["cython"] = _speedups


def _problem(n: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, 2))
    raw = rng.random((n, n))
    d = (raw + raw.T) / 2
    np.fill_diagonal(d, 0.0)
    return d, x


def _time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_primitives(sizes: list[int], repeats: int) -> None:
    print(f"{'n':>6} {'kernel':<18}", *(f"{name:>12}" for name in BACKENDS), sep="")
    for n in sizes:
        d, x = _problem(n)
        delta = _kernels_py.layout_distances(x)
        rows = {
            "layout_distances": lambda impl: impl.layout_distances(x),
            "squared_residual": lambda impl: impl.squared_residual(d, delta),
            "guttman_step": lambda impl: impl.guttman_step(d, x),
        }
        for label, call in rows.items():
            times = [_time(lambda: call(impl), repeats) for impl in BACKENDS.values()]
            cells = "".join(f"{t * 1e3:>10.2f}ms" for t in times)
            print(f"{n:>6} {label:<18}{cells}")


def bench_full_projection(sizes: list[int], repeats: int, iterations: int = 100) -> None:
    print(f"\nfull projection ({iterations} majorization iterations)")
    print(f"{'n':>6}", *(f"{name:>12}" for name in BACKENDS), "speedup".rjust(10), sep="")
    for n in sizes:
        d, x0 = _problem(n)
        denom = float(np.sum(np.triu(d * d, k=1)))

        def run(impl):
            x = x0.copy()
            sigma = np.inf
            for _ in range(iterations):
                x = np.asarray(impl.guttman_step(d, x))
                delta = impl.layout_distances(x)
                sigma = np.sqrt(impl.squared_residual(d, delta) / denom)
            return sigma

        times = {name: _time(lambda impl=impl: run(impl), repeats) for name, impl in BACKENDS.items()}
        stresses = {name: run(impl) for name, impl in BACKENDS.items()}
        reference = list(stresses.values())[0]
        assert all(abs(s - reference) < 1e-9 for s in stresses.values()), stresses
        cells = "".join(f"{times[name] * 1e3:>10.1f}ms" for name in BACKENDS)
        if "cython" in times:
            speedup = f"{times['python'] / times['cython']:>9.2f}x"
        else:
            speedup = "n/a".rjust(10)
        print(f"{n:>6}{cells}{speedup}")


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", type=int, nargs="+", default=[100, 300, 600])
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    if _speedups is None:
        print("compiled extension not available; timing the numpy fallback only\n")
    bench_primitives(args.sizes, args.repeats)
    bench_full_projection(args.sizes, args.repeats)


if __name__ == "__main__":
    main()
