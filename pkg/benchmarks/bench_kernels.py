"""Compiled vs numpy kernels on a WS(3,6,3,0.2) graph with 10% negatives.

    python3 benchmarks/bench_kernels.py [--reps 2000] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from signbalance import generators as gen
from signbalance import kernels
from signbalance.graph import _oriented_csr
from signbalance.nulls import StratifiedPermutation


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--reps", type=int, default=2000, help="null draws in the batched calls")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    g = gen.sign_uniform(gen.gen_ws(gen.WsSpec(3, 6, 3, 0.2), np.random.default_rng(0)), 0.1,
                         np.random.default_rng(1))
    tri = g.triangles
    csr = _oriented_csr(g)
    slots, bounds = StratifiedPermutation()._layout(g)
    rng = np.random.default_rng(2)
    u = rng.random((args.reps, len(slots)))
    neg = np.repeat(g.negative[None, :], args.reps, axis=0)

    try:
        backends = {"cython": kernels.get_backend("cython")}
    except ImportError:
        backends = {}
        print("compiled kernels not built; timing numpy only")
    backends["python"] = kernels.get_backend("python")

    cases = {
        "triangles": lambda k: k.triangles(*csr),
        f"census_batch x{args.reps}": lambda k: k.census_batch(neg, tri),
        f"permute_segments x{args.reps}": lambda k: k.permute_segments(neg.copy(), slots, bounds, u),
    }
    print(f"graph: {g.n} edges, {len(tri)} triangles, {len(bounds) - 1} levels")
    print(f"{'kernel':<28}" + "".join(f"{name:>12}" for name in backends) + f"{'speedup':>10}")
    for label, fn in cases.items():
        times = {name: min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat))
                 for name, k in backends.items()}
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{label:<28}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times.values()) + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()
