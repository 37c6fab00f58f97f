"""Benchmark the compiled kernels against the numpy fallback, and the
two execution paradigms against each other.

The backend comparison re-executes this script's workload in a
subprocess with TRAWL_PURE_PYTHON=1 so each backend is measured under
its own import. Run:

    python benchmarks/bench_kernels.py
"""

import json
import os
import subprocess
import sys
import time

import numpy as np


def kernel_workload(n_items=2_000_000):
    """Items/sec for each batch kernel on a mid-size power-law graph."""
    from trawl.kernels import (
        BACKEND_NAME,
        K_DEEPWALK,
        K_KHOP,
        K_NODE2VEC,
        K_PPR,
        individual_batch,
    )
    from trawl.synth import powerlaw_graph

    graph = powerlaw_graph(50_000, weighted=True, seed=0)
    rng = np.random.default_rng(1)
    transits = rng.integers(0, graph.n_vertices, n_items).astype(np.int64)
    t_prev = np.full(n_items, -1, dtype=np.int64)
    # previous vertex for node2vec: first neighbor of each transit
    has_nbrs = graph.degrees()[transits] > 0
    t_prev[has_nbrs] = graph.col_indices[graph.row_offsets[transits[has_nbrs]]]
    sample_ids = np.arange(n_items, dtype=np.int64)
    zeros = np.zeros(n_items, dtype=np.int64)
    out = np.empty(n_items, dtype=np.int64)

    results = {"backend": BACKEND_NAME}
    cases = [
        ("deepwalk", K_DEEPWALK, np.zeros(0), zeros),
        ("ppr", K_PPR, np.asarray([0.01]), zeros),
        ("khop", K_KHOP, np.zeros(0), zeros),
        ("node2vec", K_NODE2VEC, np.asarray([2.0, 0.5, 0.0]), t_prev),
    ]
    for name, code, params, prev in cases:
        t0 = time.perf_counter()
        individual_batch(code, params, graph.row_offsets, graph.col_indices,
                         graph.weights, graph.per_vertex_weight_prefix,
                         graph.per_vertex_max_weight,
                         transits, prev, sample_ids, zeros, zeros, 7, 1, out)
        dt = time.perf_counter() - t0
        results[name] = n_items / dt
    return results


def paradigm_workload():
    """End-to-end SP vs TP on walk and neighborhood apps."""
    from trawl.bench import RunConfig, compare_paradigms
    from trawl.synth import powerlaw_graph

    graph = powerlaw_graph(20_000, weighted=True, seed=3)
    rows = []
    for app, n in [("deepwalk", 20_000), ("node2vec", 10_000),
                   ("khop", 5_000), ("ppr", 20_000)]:
        cfg = RunConfig(app=app, paradigm="tp", num_samples=n, seed=9)
        rep = compare_paradigms(cfg, graph)
        rows.append({
            "app": app,
            "samples": n,
            "sp_throughput": rep.sp_report.stats.throughput(),
            "tp_throughput": rep.tp_report.stats.throughput(),
            "ratio_tp_over_sp": rep.throughput_ratio_tp_over_sp,
            "fetch_ratio_sp_over_tp": rep.fetch_ratio_sp_over_tp,
            "tp_build_share": rep.tp_report.stats.build_s
            / max(rep.tp_report.stats.total_s, 1e-9),
        })
    return rows


def main():
    if "--kernel-json" in sys.argv:
        print(json.dumps(kernel_workload()))
        return

    print("== kernel backends (items/sec) ==")
    here = kernel_workload()
    env = dict(os.environ, TRAWL_PURE_PYTHON="1")
    pure = json.loads(subprocess.run(
        [sys.executable, __file__, "--kernel-json"], env=env,
        capture_output=True, text=True, check=True).stdout)
    names = [k for k in here if k != "backend"]
    print(f"{'kernel':<10} {here['backend']:>14} {pure['backend']:>14} {'speedup':>9}")
    for name in names:
        print(f"{name:<10} {here[name]:>14.3e} {pure[name]:>14.3e} "
              f"{here[name] / pure[name]:>8.1f}x")

    print("\n== paradigms (samples/sec, current backend) ==")
    rows = paradigm_workload()
    print(f"{'app':<10} {'sp':>12} {'tp':>12} {'tp/sp':>7} "
          f"{'fetch sp/tp':>12} {'tp build%':>10}")
    for r in rows:
        print(f"{r['app']:<10} {r['sp_throughput']:>12.0f} "
              f"{r['tp_throughput']:>12.0f} {r['ratio_tp_over_sp']:>7.2f} "
              f"{r['fetch_ratio_sp_over_tp']:>12.1f} "
              f"{100 * r['tp_build_share']:>9.1f}%")


if __name__ == "__main__":
    main()
