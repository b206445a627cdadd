#!/usr/bin/env python3
"""Benchmark the compiled kernel against the pure-Python fallback.

Times the two hot paths: single-dyad change scores over all dyads, and the
Metropolis-Hastings toggle chain.  Run from the repository root:

    python3 benchmarks/bench_kernels.py [--nodes 90] [--proposals 100000]
"""

import argparse
import time

import numpy as np

from ergmkit import kernel, terms
from ergmkit.sampler import bernoulli_graph


def time_change_matrix(kname, g, kinds, params, repeats):
    out = np.empty((g.n_dyads, len(kinds)), dtype=np.float64)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        kernel.get_kernel(kname).all_change_stats(
            g.adj, g.deg, np.empty(0, dtype=np.int64), kinds, params, out
        )
        best = min(best, time.perf_counter() - t0)
    return best


def time_chain(kname, g, kinds, params, theta, proposals):
    gg = g.copy()
    edges, edge_pos = gg.ensure_edge_index()
    stats = terms.evaluate_statistics(MODEL, gg, None)
    state = np.array([1234], dtype=np.uint64)
    t0 = time.perf_counter()
    kernel.get_kernel(kname).run_chain(
        gg.adj, gg.deg, edges, edge_pos, gg.m,
        np.empty(0, dtype=np.int64), kinds, params, theta,
        proposals, 1, state, stats,
    )
    return time.perf_counter() - t0


MODEL = terms.ModelSpec(
    (terms.edges(), terms.gwesp(0.75), terms.gwnsp(0.75), terms.gwd(0.75))
)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--nodes", type=int, default=90)
    ap.add_argument("--proposals", type=int, default=100_000)
    ap.add_argument("--density", type=float, default=0.056)
    args = ap.parse_args()

    g = bernoulli_graph(args.nodes, args.density, seed=42)
    kinds, params, _ = terms.compile_terms(MODEL, None)
    theta = np.array([-4.48, 1.51, -0.15, 1.12])

    names = ["python"]
    if kernel.HAVE_COMPILED:
        names.insert(0, "cython")
    else:
        print("compiled kernel unavailable; benchmarking fallback only")

    print(f"n={args.nodes} m={g.m} model={MODEL.to_string()}")
    print(f"{'kernel':<8}{'all-dyad change scores':>26}{'chain proposals/s':>22}")
    rows = {}
    for name in names:
        # keep the slow fallback affordable
        props = args.proposals if name == "cython" else max(2_000, args.proposals // 50)
        dt_cm = time_change_matrix(name, g, kinds, params, repeats=3)
        dt_ch = time_chain(name, g, kinds, params, theta, props)
        rows[name] = (dt_cm, props / dt_ch)
        print(f"{name:<8}{dt_cm * 1e3:>22.2f} ms{props / dt_ch:>20,.0f}")
    if len(rows) == 2:
        cm = rows["python"][0] / rows["cython"][0]
        ch = rows["cython"][1] / rows["python"][1]
        print(f"speedup: change scores {cm:.1f}x, chain {ch:.1f}x")


if __name__ == "__main__":
    main()
