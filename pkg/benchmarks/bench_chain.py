"""Benchmark the compiled Glauber kernel against the pure-Python fallback.

Runs the same seeded workload through both kernels, verifies that the outputs
are bit-identical, and reports steps per second.

Usage: python benchmarks/bench_chain.py [--steps N]
"""

import argparse
import time

import numpy as np

from gibbs_spectral import _chain_py
from gibbs_spectral.dynamics import _flat_adjacency
from gibbs_spectral.gibbs import GibbsSpec
from gibbs_spectral.graph import cycle_graph

try:
    from gibbs_spectral import _chain_ext
except ImportError:
    _chain_ext = None


def run(kernel, g, spec, steps, seed):
    neigh, offs = _flat_adjacency(g)
    free = np.arange(g.n, dtype=np.int32)
    spins = np.full(g.n, -1, dtype=np.int8)
    t0 = time.perf_counter()
    kernel.run_steps(neigh, offs, spins, free, spec.lam, spec.beta, spec.gamma,
                     steps, seed, 0)
    elapsed = time.perf_counter() - t0
    return spins, elapsed


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=2_000_000)
    parser.add_argument("--py-steps", type=int, default=200_000,
                        help="smaller workload for the slow fallback")
    args = parser.parse_args()

    g = cycle_graph(16)
    spec = GibbsSpec.hardcore(1.0)
    seed = 12345

    rows = []
    spins_py, t_py = run(_chain_py, g, spec, args.py_steps, seed)
    rows.append(("python", args.py_steps, t_py))

    if _chain_ext is not None:
        spins_ext, t_ext = run(_chain_ext, g, spec, args.steps, seed)
        rows.append(("compiled", args.steps, t_ext))
        spins_check, _ = run(_chain_ext, g, spec, args.py_steps, seed)
        identical = np.array_equal(spins_py, spins_check)
        print(f"bit-identical outputs across backends: {identical}")
        if not identical:
            raise SystemExit("backend outputs differ; kernels are out of sync")
    else:
        print("compiled kernel not built; benchmarking the fallback only")

    print(f"{'backend':<10} {'steps':>12} {'seconds':>10} {'steps/sec':>14}")
    for name, steps, elapsed in rows:
        print(f"{name:<10} {steps:>12} {elapsed:>10.3f} {steps / elapsed:>14.3g}")
    if len(rows) == 2:
        speedup = (rows[1][1] / rows[1][2]) / (rows[0][1] / rows[0][2])
        print(f"compiled kernel speedup: {speedup:.1f}x")


if __name__ == "__main__":
    main()
