"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the two hot operations on realistic shapes: the half-stored
Hermitian matvec that drives the eigensolver, and the fused
``acc += |z|**2`` accumulation that drives the neighbor search.  Both
backends are called directly, so the script works regardless of which
one the package selected at import time.

Usage::

    python3 benchmarks/bench_kernels.py [--repeats 7]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from mfvdm import kernels


def _time(func, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        func()
        best = min(best, time.perf_counter() - start)
    return best


def _edge_arrays(rng, n: int, edges_per_node: int):
    count = n * edges_per_node
    rows = rng.integers(0, n - 1, size=count).astype(np.int64)
    cols = rows + rng.integers(1, n - rows)
    cols = np.minimum(cols, n - 1).astype(np.int64)
    values = rng.normal(size=count) + 1j * rng.normal(size=count)
    return rows, cols, values


def bench_matvec(rng, n: int, edges_per_node: int, repeats: int):
    rows, cols, values = _edge_arrays(rng, n, edges_per_node)
    x = rng.normal(size=n) + 1j * rng.normal(size=n)
    reference = kernels.hermitian_matvec_numpy(rows, cols, values, x, n)
    times = {"numpy": _time(
        lambda: kernels.hermitian_matvec_numpy(rows, cols, values, x, n),
        repeats)}
    if kernels.backend() == "cython":
        result = kernels.hermitian_matvec_ext(rows, cols, values, x, n)
        err = np.max(np.abs(result - reference))
        if err > 1e-10:
            raise AssertionError(f"backend mismatch: {err:.3e}")
        times["cython"] = _time(
            lambda: kernels.hermitian_matvec_ext(rows, cols, values, x, n),
            repeats)
    return times


def bench_accumulate(rng, block: int, n: int, repeats: int):
    z = (rng.normal(size=(block, n))
         + 1j * rng.normal(size=(block, n)))
    acc = np.zeros((block, n))
    kernels.accumulate_abs2_numpy(acc, z)
    reference = acc.copy()
    times = {"numpy": _time(
        lambda: kernels.accumulate_abs2_numpy(np.zeros((block, n)), z),
        repeats)}
    if kernels.backend() == "cython":
        acc[:] = 0.0
        kernels.accumulate_abs2_ext(acc, z)
        err = np.max(np.abs(acc - reference))
        if err > 1e-10:
            raise AssertionError(f"backend mismatch: {err:.3e}")
        times["cython"] = _time(
            lambda: kernels.accumulate_abs2_ext(np.zeros((block, n)), z),
            repeats)
    return times


def _report(label: str, times: dict) -> None:
    numpy_ms = times["numpy"] * 1e3
    if "cython" in times:
        cython_ms = times["cython"] * 1e3
        print(f"{label:<42} numpy {numpy_ms:8.3f} ms   "
              f"cython {cython_ms:8.3f} ms   "
              f"speedup {numpy_ms / cython_ms:5.2f}x")
    else:
        print(f"{label:<42} numpy {numpy_ms:8.3f} ms   "
              f"cython unavailable")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=7,
                        help="repetitions per measurement; best is kept")
    args = parser.parse_args()
    rng = np.random.default_rng(0)
    print(f"active backend: {kernels.backend()}")
    for n, per_node in ((3_000, 60), (10_000, 150)):
        times = bench_matvec(rng, n, per_node, args.repeats)
        _report(f"hermitian_matvec n={n} edges/node={per_node}", times)
    for block, n in ((512, 3_000), (512, 10_000)):
        times = bench_accumulate(rng, block, n, args.repeats)
        _report(f"accumulate_abs2 block={block}x{n}", times)


if __name__ == "__main__":
    main()
