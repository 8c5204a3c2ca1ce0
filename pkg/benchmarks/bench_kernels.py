#!/usr/bin/env python3
"""Benchmark the hot kernels on both backends (numba @njit vs pure numpy).

Builds a large triangle-free regular instance, then times the full
randomized-step kernel chain (weight update + per-vertex/per-edge
statistics) and the standalone segmented reductions for each backend.

Usage:
    python benchmarks/bench_kernels.py [--n-side 1000] [--d 30] [--k 60]
                                       [--steps 20] [--seed 0]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from corrcolor import _kernels as kernels
from corrcolor import gen_random_bipartite_regular, random_cover
from corrcolor.nibble import reduct_step
from corrcolor.weights import ReductState, Weighting


def time_steps(state, steps, seed):
    t0 = time.perf_counter()
    for i in range(steps):
        reduct_step(state, seed=seed + i)
    return (time.perf_counter() - t0) / steps


def time_segments(values, ptr, repeats):
    t0 = time.perf_counter()
    for _ in range(repeats):
        kernels.segment_sum(values, ptr)
        kernels.segment_prod(values, ptr)
    return (time.perf_counter() - t0) / repeats


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-side", type=int, default=1000)
    ap.add_argument("--d", type=int, default=30)
    ap.add_argument("--k", type=int, default=60)
    ap.add_argument("--steps", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(
        f"instance: bipartite {args.d}-regular on {2*args.n_side} vertices,"
        f" lists of size {args.k}"
    )
    g = gen_random_bipartite_regular(args.n_side, args.d, seed=args.seed)
    cover = random_cover(g, args.k, seed=args.seed + 1)
    arrs = cover.arrays
    print(
        f"colors: {arrs.n_colors}, matched pairs: {arrs.pair_x.size},"
        f" color adjacency entries: {arrs.nbr_idx.size}"
    )
    p_hat = 2.5 / args.k
    state = ReductState.initial(
        g, cover, Weighting.uniform(cover, 1.0 / args.k, p_hat),
        max_deg=args.d, k=args.k,
    )
    rng = np.random.default_rng(args.seed)
    seg_values = rng.uniform(0.5, 1.5, arrs.nbr_idx.size)

    results = {}
    for backend in kernels.available_backends():
        kernels.set_backend(backend)
        # warm-up: triggers JIT compilation on the numba path
        reduct_step(state, seed=10**6)
        kernels.segment_sum(seg_values, arrs.nbr_ptr)
        kernels.segment_prod(seg_values, arrs.nbr_ptr)
        step_s = time_steps(state, args.steps, seed=args.seed)
        seg_s = time_segments(seg_values, arrs.nbr_ptr, repeats=max(5, args.steps))
        results[backend] = (step_s, seg_s)
        print(
            f"{backend:>6}: full step {step_s*1e3:8.2f} ms,"
            f" segmented sum+prod {seg_s*1e3:8.2f} ms"
        )
    if len(results) == 2:
        np_step, np_seg = results["numpy"]
        nb_step, nb_seg = results["numba"]
        print(
            f"speedup (numpy/numba): full step {np_step/nb_step:.2f}x,"
            f" segments {np_seg/nb_seg:.2f}x"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
