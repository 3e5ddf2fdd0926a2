#!/usr/bin/env python3
"""Time the two greedy-hour backends against each other.

The year sweep spends nearly all its time in the per-hour greedy kernel,
so this is the number that decides whether the JIT path is worth having.
Both backends run over the same bundled capacity matrix and must agree
bit for bit before any timing is reported.
"""

import argparse
import time

import numpy as np

from grasp._kernels import HAS_NUMBA, greedy_hour_jit, greedy_hour_numpy
from grasp.datafiles import data_path, load_profiles_dir


def run_backend(fn, capacity, jobs):
    hours, m = capacity.shape
    loads = np.empty((hours, m), dtype=np.int64)
    for h in range(hours):
        loads[h] = fn(capacity[h], jobs)
    return loads


def best_of(fn, capacity, jobs, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        run_backend(fn, capacity, jobs)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--jobs-per-hour", type=int, default=900)
    parser.add_argument("--hours", type=int, default=8760)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--k", type=float, default=1.0)
    args = parser.parse_args()

    profiles = load_profiles_dir(data_path("sites"))
    capacity = np.stack([p.wh for p in profiles], axis=1)[: args.hours] / args.k
    jobs = args.jobs_per_hour
    print("m=%d hours=%d jobs/hour=%d k=%g" % (capacity.shape[1], capacity.shape[0], jobs, args.k))

    backends = [("numpy", greedy_hour_numpy)]
    if HAS_NUMBA:
        greedy_hour_jit(capacity[0], jobs)  # compile outside the timing
        backends.append(("numba", greedy_hour_jit))
    else:
        print("numba unavailable or disabled, timing the numpy path only")

    reference = run_backend(backends[0][1], capacity, jobs)
    for name, fn in backends[1:]:
        if not np.array_equal(run_backend(fn, capacity, jobs), reference):
            raise SystemExit("backend %r disagrees with numpy, refusing to time" % name)

    times = {}
    for name, fn in backends:
        times[name] = best_of(fn, capacity, jobs, args.repeat)
        decisions = jobs * capacity.shape[0]
        print(
            "%-6s %8.3f s/year  %10.0f decisions/s"
            % (name, times[name], decisions / times[name] if times[name] else float("inf"))
        )
    if "numba" in times and times["numba"] > 0:
        print("speedup numba/numpy: %.1fx" % (times["numpy"] / times["numba"]))


if __name__ == "__main__":
    main()
