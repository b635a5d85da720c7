"""Time the compiled kernels against the pure-Python fallback.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``.  Each workload
is run on both backends, the outputs are compared, and the best wall time of
``--repeat`` runs is reported together with the speedup.
"""
from __future__ import annotations

import argparse
import itertools
import random
import sys
import time

from ellis_lab import _pykernels

try:
    from ellis_lab import _kernels
except ImportError:  # extension not built
    _kernels = None


def _perm_generators(k):
    cycle = tuple(list(range(1, k)) + [0])
    swap = (1, 0) + tuple(range(2, k))
    return [cycle, swap]


def _random_maps(rng, k, count):
    return [tuple(rng.randrange(k) for _ in range(k)) for _ in range(count)]


def workloads():
    rng = random.Random(1)
    s6 = _pykernels.transformation_closure(_perm_generators(6))
    bits = [rng.randrange(2) for _ in range(4096)]
    arcs = [(a, b) for a in range(0, 24, 4) for b in range(0, 24, 3) if a != b]
    return {
        "closure S7 (5040 maps)": lambda m: m.transformation_closure(_perm_generators(7)),
        "closure random maps on 6 points": lambda m: m.transformation_closure(_random_maps(random.Random(5), 6, 3)),
        "compose_table S6 (720x720)": lambda m: m.compose_table(s6),
        "first_occurrence window 4096": lambda m: [
            m.first_occurrence(bits, [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11], list(v)) for v in itertools.islice(itertools.product((0, 1), repeat=12), 0, 4096, 97)
        ],
        "min_translates window 4096": lambda m: m.min_translates(bits, [0, 2, 5], [1, 0, 1], 64),
        f"ro_law_sweep {len(arcs)} arcs on grid 24": lambda m: m.ro_law_sweep(arcs, 24),
    }


def best_time(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not available; build with pip install -e . --no-build-isolation")
        return 1
    print(f"{'workload':42} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    status = 0
    for name, work in workloads().items():
        tp, op = best_time(lambda: work(_pykernels), args.repeat)
        tc, oc = best_time(lambda: work(_kernels), args.repeat)
        same = op == oc
        status |= not same
        flag = "" if same else "  OUTPUT MISMATCH"
        print(f"{name:42} {tp:10.4f} {tc:10.4f} {tp / tc:7.1f}x{flag}")
    return status


if __name__ == "__main__":
    sys.exit(main())
