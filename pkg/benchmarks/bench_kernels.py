"""Compare the compiled kernels with the NumPy/Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from oddcycle import kernels
from oddcycle.bounds import exclusivity_graph
from oddcycle.quantum import prepared_state


def cases():
    rng = np.random.default_rng(0)
    rho = np.ascontiguousarray(prepared_state(None).rho.real)
    masks = exclusivity_graph(13).neighbour_masks()
    n, size = 9, 200_000
    table = rng.dirichlet(np.ones(4), size=(4, n, n))
    gamma, x, y = (rng.integers(0, k, size).astype(np.int64) for k in (4, n, n))
    u = rng.random(size)
    probs = np.array([0.1, 0.2, 0.3, 0.4])
    return {
        "classical_optimum(n=9)": lambda m: m.classical_optimum(9),
        "max_independent_set(M_52)": lambda m: m.max_independent_set(masks),
        "born_probabilities x1000": lambda m: [m.born_probabilities(rho, 0.3, -0.7) for _ in range(1000)],
        "pick_outcome x10000": lambda m: [m.pick_outcome(probs, 0.55) for _ in range(10000)],
        "tally_outcomes(2e5 rounds)": lambda m: m.tally_outcomes(gamma, x, y, u, table),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    impls = kernels.backends()
    if "compiled" not in impls:
        print("compiled extension not built; only the fallback is available")
    names = sorted(impls)
    print(f"{'kernel':30s}" + "".join(f"{name:>14s}" for name in names) + ("   speedup" if len(names) == 2 else ""))
    for label, fn in cases().items():
        times = {}
        for name in names:
            mod = impls[name]
            times[name] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        row = f"{label:30s}" + "".join(f"{times[name] * 1e3:12.3f}ms" for name in names)
        if len(names) == 2:
            row += f"   {times['python'] / times['compiled']:7.1f}x"
        print(row)


if __name__ == "__main__":
    main()
