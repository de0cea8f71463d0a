"""Time the compiled simplex kernel against the numpy fallback.

Usage: python3 benchmarks/bench_kernel.py [--repeat 5]

Each workload is a two-phase float solve on the standard form the package
builds internally, so the numbers isolate the pivot loop.
"""

import argparse
import statistics
import time

import numpy as np

from contextuality.lp import LpProblem
from contextuality.lp.kernel import available_backends
from contextuality.lp.simplex import _float_two_phase, _standard_form
from contextuality.polytope import coupling_deficit_problem, extended_system, vertex_matrix
from contextuality.sampling import NondisturbingSampler
from contextuality.scenario import n_cycle


def workloads(rng):
    out = []
    for n in (4, 5, 6):
        s = n_cycle(n)
        b = NondisturbingSampler.build(s, rng, tries=50).sample(rng)
        out.append((f"extended deficit LP, {n}-cycle", coupling_deficit_problem(b, extended_system(s))))
        A = vertex_matrix(s).matrix()
        out.append((f"membership LP, {n}-cycle", LpProblem(np.zeros(A.shape[1]), A, b.vector())))
    for m, n in ((10, 40), (20, 80)):
        A = rng.standard_normal((m, n))
        out.append((f"dense random {m}x{n}", LpProblem(rng.standard_normal(n), A, A @ rng.random(n),
                                                       upper=np.full(n, 5.0))))
    return out


def timed(std, mod, repeat):
    runs = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        res = _float_two_phase(std.A, std.b, std.c, 1e-7, loop=mod.simplex_loop, pivot=mod.pivot)
        runs.append(time.perf_counter() - t0)
    return statistics.median(runs), res


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    backends = available_backends()
    if "cython" not in backends:
        print("compiled kernel not built; run `pip install -e . --no-build-isolation` first")
    rng = np.random.default_rng(args.seed)
    print(f"{'workload':34s} {'rows x cols':>12s} {'iters':>6s} " + " ".join(f"{k:>10s}" for k in backends)
          + ("    speedup  same" if len(backends) > 1 else ""))
    for name, problem in workloads(rng):
        std = _standard_form(problem, exact=False)
        results = {k: timed(std, mod, args.repeat) for k, mod in backends.items()}
        shape = f"{std.A.shape[0]}x{std.A.shape[1]}"
        iters = next(iter(results.values()))[1].iterations
        line = f"{name:34s} {shape:>12s} {iters:6d} " + " ".join(f"{t * 1e3:8.2f}ms" for t, _ in results.values())
        if len(results) > 1:
            py, cy = results["python"], results["cython"]
            same = py[1].basis == cy[1].basis and py[1].x.tobytes() == cy[1].x.tobytes()
            line += f"  {py[0] / cy[0]:8.1f}x  {'yes' if same else 'NO'}"
        print(line)


if __name__ == "__main__":
    main()
