"""Compiled vs pure kernels: per-kernel microbenchmarks and one end-to-end enumeration.

    python benchmarks/bench_kernels.py [--repeat N]
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from artifact import _kernels_py as pure

try:
    from artifact import _kernels as compiled
except ImportError:
    compiled = None

END_TO_END = ("import time; from artifact import geometry as g; t = time.perf_counter(); "
              "d = g.DoubledSpace(g.build_group('C', 1, 2).space, 2); "
              "n = len(g.enumerate_max_isotropic(d)); print(n, time.perf_counter() - t)")


def cases(rng: np.random.Generator):
    p = 3
    A = rng.integers(0, p, (12, 12))
    B = rng.integers(0, p, (12, 12))
    S = rng.integers(0, p, (4, 12))
    while pure.rank(A, p) < 12:
        A = rng.integers(0, p, (12, 12))
    return {
        "matmul 12x12": lambda m: m.matmul(A, B, p),
        "rref 12x12": lambda m: m.rref(A, p),
        "nullspace 4x12": lambda m: m.nullspace(S, p),
        "inverse 12x12": lambda m: m.inverse(A, p),
        "act_rref 4x12": lambda m: m.act_rref(S, A, p),
    }


def end_to_end(pure_mode: bool) -> float:
    env = dict(os.environ, BDCOVER_PURE="1" if pure_mode else "0")
    out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, check=True,
                         capture_output=True, text=True).stdout.split()
    return float(out[1])


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=2000)
    a = ap.parse_args(argv)
    if compiled is None:
        print("compiled kernels not built; nothing to compare")
        return 1
    rng = np.random.default_rng(0)
    print(f"{'kernel':<18}{'pure us':>10}{'compiled us':>13}{'speedup':>9}")
    for name, fn in cases(rng).items():
        tp = min(timeit.repeat(lambda: fn(pure), number=a.repeat, repeat=3)) / a.repeat * 1e6
        tc = min(timeit.repeat(lambda: fn(compiled), number=a.repeat, repeat=3)) / a.repeat * 1e6
        print(f"{name:<18}{tp:>10.1f}{tc:>13.1f}{tp / tc:>8.1f}x")
    tp, tc = end_to_end(True), end_to_end(False)
    print(f"{'Lagrangians q=2':<18}{tp * 1e6:>10.0f}{tc * 1e6:>13.0f}{tp / tc:>8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
