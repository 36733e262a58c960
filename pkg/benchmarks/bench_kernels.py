#!/usr/bin/env python
"""Benchmark the numba kernels against the pure-numpy fallback.

Run twice to compare builds:

    python benchmarks/bench_kernels.py
    DISTORTSEARCH_NO_NUMBA=1 python benchmarks/bench_kernels.py
"""
from __future__ import annotations

import argparse
from time import perf_counter

import numpy as np

from distortsearch._kernels import (
    accumulate_scores,
    backend_name,
    pairwise_sq_dists,
)


def _time(fn, repeats: int) -> float:
    fn()  # warm-up (JIT compile on the numba build)
    best = float("inf")
    for _ in range(repeats):
        start = perf_counter()
        fn()
        best = min(best, perf_counter() - start)
    return best


def bench_pairwise(rows: int, cols: int, repeats: int) -> None:
    rng = np.random.default_rng(11)
    a = rng.random((rows, cols))
    b = rng.random((rows, cols))
    best = _time(lambda: pairwise_sq_dists(a, b), repeats)
    pairs = rows * rows
    print(
        f"pairwise_sq_dists [{backend_name():5s}] {rows}x{cols}: "
        f"{best * 1e3:8.2f} ms  ({pairs / best / 1e6:7.1f} Mpairs/s)"
    )


def bench_accumulate(postings: int, docs: int, repeats: int) -> None:
    rng = np.random.default_rng(13)
    doc_idx = rng.integers(0, docs, size=postings)
    weights = rng.random(postings)
    scores = np.zeros(docs, dtype=np.float64)
    best = _time(lambda: accumulate_scores(scores, doc_idx, weights), repeats)
    print(
        f"accumulate_scores [{backend_name():5s}] {postings} postings / {docs} docs: "
        f"{best * 1e3:8.2f} ms  ({postings / best / 1e6:7.1f} Mpostings/s)"
    )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=400)
    parser.add_argument("--cols", type=int, default=600)
    parser.add_argument("--postings", type=int, default=200_000)
    parser.add_argument("--docs", type=int, default=5_000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    print(f"kernel backend: {backend_name()}")
    bench_pairwise(args.rows, args.cols, args.repeats)
    bench_accumulate(args.postings, args.docs, args.repeats)


if __name__ == "__main__":
    main()
