"""Time the compiled kernels against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat R]

Both backends run on the same value tables and must return identical results.
"""

from __future__ import annotations

import argparse
import importlib
import time

import numpy as np

from connsys import _pykernels
from connsys.instances import Graph, cut_rank, edge_connectivity, vertex_connectivity


def _grid(r: int, c: int) -> Graph:
    vs = [f"{i}.{j}" for i in range(r) for j in range(c)]
    es = [(f"{i}.{j}", f"{i}.{j + 1}") for i in range(r) for j in range(c - 1)]
    es += [(f"{i}.{j}", f"{i + 1}.{j}") for i in range(r - 1) for j in range(c)]
    return Graph(vs, es)


def _cases():
    g = _grid(3, 4)
    k = vertex_connectivity(_grid(2, 5))
    return [
        ("nu grid 3x4 (n=12)", np.ascontiguousarray(edge_connectivity(g).table(), dtype=np.int64), 12),
        ("rho grid 3x4 (n=12)", np.ascontiguousarray(cut_rank(g).table(), dtype=np.int64), 12),
        ("kappa grid 2x5 (n=13)", np.ascontiguousarray(k.table(), dtype=np.int64), k.n),
    ]


def _time(fn, repeat: int):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return bool(np.array_equal(np.asarray(a), np.asarray(b)))
    return a == b


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    try:
        compiled = importlib.import_module("connsys._kernels")
    except ImportError:
        print("compiled extension not built; nothing to compare")
        return
    rows = []
    for name, table, n in _cases():
        jobs = {
            "local_submodular_ok": lambda k: k.local_submodular_ok(table, n),
            "bw_dp": lambda k: k.bw_dp(table, n)[0],
            "well_linked_violation": lambda k: k.well_linked_violation(table, n, (1 << n) - 1),
        }
        for job, fn in jobs.items():
            tc, rc = _time(lambda: fn(compiled), args.repeat)
            tp, rp = _time(lambda: fn(_pykernels), 1)
            if not _same(rc, rp):
                raise SystemExit(f"backends disagree on {job} for {name}")
            rows.append((name, job, tc, tp))
    print(f"{'instance':<24}{'kernel':<24}{'cython s':>10}{'python s':>10}{'speedup':>9}")
    for name, job, tc, tp in rows:
        print(f"{name:<24}{job:<24}{tc:>10.4f}{tp:>10.4f}{tp / max(tc, 1e-9):>8.1f}x")


if __name__ == "__main__":
    main()
