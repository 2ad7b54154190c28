"""Compare the compiled and pure-Python search kernels on the same CNFs.

    python3 benchmarks/bench_backends.py [--trials 5] [--seed 0]

Instances are SAT encodings of generated learning sets plus a few random
3-CNFs near the phase transition.  Both kernels follow the same search, so
the decision and conflict counts must match; only the wall time differs.
"""

import argparse
import random
import statistics
import sys
import time

from ncsat.bench import trial_seed
from ncsat.sat import CnfInstance, encode
from ncsat.solver import kernels, solve
from ncsat.synth import GenConfig, generate


def encoded(n, p, k, trials, seed):
    for t in range(trials):
        _, data = generate(GenConfig(n, p, k, trial_seed(seed, n, p, k, t)))
        yield encode(data)


def random_3cnf(rng, nv, ratio=4.26):
    clauses = []
    for _ in range(int(nv * ratio)):
        vs = rng.sample(range(1, nv + 1), 3)
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    return CnfInstance(nv, clauses)


def workloads(trials, seed):
    for n, p, k in [(4, 2, 64), (6, 3, 64), (8, 2, 128), (8, 3, 128)]:
        yield f"ncs N={n} p={p} X*={k}", list(encoded(n, p, k, trials, seed))
    rng = random.Random(seed)
    for nv in (50, 100):
        yield f"3-cnf v={nv}", [random_3cnf(rng, nv) for _ in range(trials)]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    ks = kernels()
    if "cython" not in ks:
        print("compiled kernel not built; run `pip install --no-build-isolation -e .` first")
        return 1
    print(f"{'workload':<24}{'python ms':>12}{'cython ms':>12}{'speedup':>10}")
    for name, cnfs in workloads(args.trials, args.seed):
        times = {}
        for backend in ("python", "cython"):
            per, traces = [], []
            for cnf in cnfs:
                t0 = time.perf_counter()
                res = solve(cnf, backend=backend)
                per.append((time.perf_counter() - t0) * 1000)
                traces.append((res.status, res.decisions, res.conflicts))
            times[backend] = (statistics.median(per), traces)
        if times["python"][1] != times["cython"][1]:
            print(f"{name}: kernels disagree on the search trace", file=sys.stderr)
            return 2
        py, cy = times["python"][0], times["cython"][0]
        print(f"{name:<24}{py:>12.2f}{cy:>12.2f}{py / cy:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
