"""Time the compiled and pure-Python cores on the same inputs.

    python3 benchmarks/bench_backends.py [--repeat 3] [--sweeps 3]

Graphs are random with fixed seeds, sized like the largest public datasets.
Both cores must produce identical output; the script exits non-zero if not.
"""

import argparse
import sys
import time

import numpy as np

from mwfasrank._backend import BACKENDS
from mwfasrank.graph import WeightedDigraph
from mwfasrank.losses import ComparisonMatrix
from mwfasrank.optimizer import OptimizerConfig, minimize_ratio_loss
from mwfasrank.ranking import topological_rank
from mwfasrank.solver import solve_local_ratio

SIZES = [(20, 164), (145, 1204), (602, 5002), (351, 7650)]


def make_graph(n, m, seed):
    rng = np.random.default_rng(seed)
    picks = rng.choice(n * (n - 1), size=m, replace=False)
    src = picks // (n - 1)
    dst = picks % (n - 1)
    dst = dst + (dst >= src)
    w = rng.integers(1, 11, size=m)
    return WeightedDigraph.from_edges(zip(src.tolist(), dst.tolist(), w.tolist()), n)


def best_of(repeat, fn):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--sweeps", type=int, default=3, help="optimizer sweeps per run")
    args = ap.parse_args(argv)

    if "compiled" not in BACKENDS:
        print("compiled backend not built; only the python core is timed", file=sys.stderr)
    names = sorted(BACKENDS)
    config = OptimizerConfig(num_iterations=args.sweeps)
    header = f"{'graph':>12}  {'stage':<9}" + "".join(f"{b:>12}" for b in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(header)
    mismatch = False
    for n, m in SIZES:
        g = make_graph(n, m, seed=n)
        cm = ComparisonMatrix.from_graph(g)
        scores = topological_rank(solve_local_ratio(g).residual_dag, g).scores
        for stage in ("solve", "optimize"):
            times, outs = [], []
            for b in names:
                if stage == "solve":
                    t, res = best_of(args.repeat, lambda b=b: solve_local_ratio(g, backend=b))
                    outs.append(res.removed_edges)
                else:
                    t, res = best_of(args.repeat, lambda b=b: minimize_ratio_loss(cm, scores, config, backend=b))
                    outs.append(res.tobytes())
                times.append(t)
            if any(o != outs[0] for o in outs[1:]):
                mismatch = True
            row = f"{f'{n}/{m}':>12}  {stage:<9}" + "".join(f"{t:12.4f}" for t in times)
            if len(names) == 2:
                row += f"{times[1] / times[0]:9.1f}x"
            print(row)
    if mismatch:
        print("backends disagree", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
