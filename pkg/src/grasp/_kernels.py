"""Hot loops behind the year-scale experiments.

One simulated year at realistic load is millions of sequential placement
decisions, far too many for the per-decision scheduler API.  The kernels
here replay the same policies in bulk, one hour at a time.

Two interchangeable implementations exist for the greedy hour:

- a numba-compiled loop (`greedy_hour_jit`), the default when numba
  imports cleanly;
- a vectorized numpy selection (`greedy_hour_numpy`), used as fallback
  and selectable explicitly with GRASP_DISABLE_NUMBA=1.

Both must produce bit-identical assignments to the sequential scheduler;
the test suite checks all three against each other.  The score of the
(i+1)-th job on data center d is scores0[d] - i, so every candidate value
is the same float expression in all paths and float rounding cannot make
them diverge.  `benchmarks/bench_kernels.py` compares the two.
"""

import os

import numpy as np


def _greedy_hour_loop(scores0, jobs):
    # reference loop, compiled by numba below; mirrors green_aware_decide
    m = scores0.shape[0]
    loads = np.zeros(m, dtype=np.int64)
    for _ in range(jobs):
        best = 0
        best_score = scores0[0] - loads[0]
        for d in range(1, m):
            score = scores0[d] - loads[d]
            if score > best_score:
                best = d
                best_score = score
        loads[best] += 1
    return loads


def greedy_hour_numpy(scores0, jobs):
    """Vectorized greedy hour.

    The candidate score of the (i+1)-th job on data center d is
    scores0[d] - i and each data center's candidates are non-increasing,
    so the greedy picks are exactly the `jobs` best candidates ordered by
    (score desc, index asc).  lexsort gives that order directly.
    """
    scores0 = np.ascontiguousarray(scores0, dtype=np.float64)
    m = scores0.shape[0]
    if jobs == 0:
        return np.zeros(m, dtype=np.int64)
    steps = np.arange(jobs, dtype=np.float64)
    candidates = scores0[:, None] - steps[None, :]
    owner = np.repeat(np.arange(m), jobs)
    order = np.lexsort((owner, -candidates.ravel()))
    taken = owner[order[:jobs]]
    return np.bincount(taken, minlength=m).astype(np.int64)


def round_robin_hour(m, cursor, jobs):
    """Closed-form round robin hour: every data center gets jobs // m, and
    the remainder lands on the m positions starting at the cursor."""
    loads = np.full(m, jobs // m, dtype=np.int64)
    extra = jobs % m
    offsets = (np.arange(m) - cursor) % m
    loads[offsets < extra] += 1
    return loads, (cursor + jobs) % m


_DISABLED = os.environ.get("GRASP_DISABLE_NUMBA", "") not in ("", "0")

try:
    if _DISABLED:
        raise ImportError("disabled via GRASP_DISABLE_NUMBA")
    from numba import njit

    greedy_hour_jit = njit(cache=True, nogil=True)(_greedy_hour_loop)
    HAS_NUMBA = True
except ImportError:
    greedy_hour_jit = None
    HAS_NUMBA = False

greedy_hour = greedy_hour_jit if HAS_NUMBA else greedy_hour_numpy


def active_backend():
    return "numba" if HAS_NUMBA else "numpy"


def warmup():
    """Trigger JIT compilation outside of timed sections."""
    greedy_hour(np.array([1.0, 0.5]), 3)
