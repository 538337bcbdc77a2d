"""Benchmark the accelerated kernels against the interpreted fallback.

Both builds run the same function; the accelerated one is compiled with
numba.  The build is selected per call through the TREEVERIFY_NO_NUMBA
environment variable, so a single process can time both.

Usage: python3 benchmarks/bench_kernels.py [--trees N] [--depth D] [--repeat R]
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from treeverify import Box, Ensemble, Internal, Leaf, PostProcess, Tree
from treeverify import kernels
from treeverify.kernels import MODE_COUNT, flatten, predict_batch, run_enumeration

F32 = np.float32


def random_model(rng, n, m, trees, depth) -> Ensemble:
    thresholds = np.linspace(-2.0, 2.0, 15).astype(F32)

    def build(d):
        if d == 0:
            return Leaf(rng.normal(size=m).astype(F32))
        return Internal(int(rng.integers(n)), F32(rng.choice(thresholds)),
                        build(d - 1), build(d - 1))

    return Ensemble(trees=tuple(Tree(build(depth)) for _ in range(trees)),
                    n=n, m=m, post=PostProcess.SOFTMAX)


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def with_build(jit: bool, fn, repeat):
    old = os.environ.pop(kernels.ENV_DISABLE, None)
    try:
        if not jit:
            os.environ[kernels.ENV_DISABLE] = "1"
        return timed(fn, repeat)
    finally:
        if old is not None:
            os.environ[kernels.ENV_DISABLE] = old


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trees", type=int, default=4)
    parser.add_argument("--depth", type=int, default=6)
    parser.add_argument("--inputs", type=int, default=3)
    parser.add_argument("--outputs", type=int, default=3)
    parser.add_argument("--points", type=int, default=20000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    if not kernels.HAVE_NUMBA:
        print("numba is not installed; nothing to compare")
        return 1

    rng = np.random.default_rng(0)
    e = random_model(rng, args.inputs, args.outputs, args.trees, args.depth)
    flat = flatten(e)
    box = Box.full(e.n)
    X = rng.uniform(-4, 4, size=(args.points, e.n)).astype(F32)

    def enumerate_once():
        return run_enumeration(flat, box.lower, box.upper,
                               kernels.LEAST_POINTS_FIRST, MODE_COUNT)

    def predict_once():
        return predict_batch(flat, X)

    # warm up compilation outside the timed region
    with_build(True, enumerate_once, 1)
    with_build(True, predict_once, 1)

    print(f"model: {args.trees} trees, depth {args.depth}, "
          f"{args.inputs} inputs, {args.outputs} outputs (softmax)")
    for label, fn, describe in (
            ("class enumeration", enumerate_once,
             lambda r: f"{r[1]} classes, {r[2]} nodes"),
            (f"batch prediction ({args.points} points)", predict_once,
             lambda r: "")):
        t_jit, r_jit = with_build(True, fn, args.repeat)
        t_pure, r_pure = with_build(False, fn, args.repeat)
        extra = describe(r_jit)
        print(f"  {label}: accelerated {t_jit * 1e3:8.2f} ms | "
              f"interpreted {t_pure * 1e3:10.2f} ms | "
              f"speedup {t_pure / t_jit:7.1f}x"
              + (f"  [{extra}]" if extra else ""))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
