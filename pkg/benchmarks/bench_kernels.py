"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat N]

Times the two hot kernels directly, then an end-to-end search under each
backend in a fresh interpreter (the backend is chosen at import time).
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from dilemma_search import kernels
from dilemma_search.decision_tree import planted_noise_dataset

END_TO_END = """
import time
from dilemma_search import kernels
from dilemma_search.core import SearchConfig, dfs_search
from dilemma_search.decision_tree import DecisionTreeAdapter, planted_noise_dataset, split_dataset
from dilemma_search.knapsack import KnapsackAdapter, generate_instance
T, V, _ = split_dataset(planted_noise_dataset(4000, seed=1))
t0 = time.perf_counter()
dfs_search(DecisionTreeAdapter(T, V), SearchConfig(max_iterations=200))
t1 = time.perf_counter()
dfs_search(KnapsackAdapter(generate_instance(14, 3)), SearchConfig(max_iterations=10**9))
t2 = time.perf_counter()
print(kernels.BACKEND, t1 - t0, t2 - t1)
"""


def kernel_timings(repeat):
    D = planted_noise_dataset(4000, seed=1)
    rows = np.arange(D.n_rows, dtype=np.int64)
    attrs = np.arange(len(D.attributes), dtype=np.int64)
    rng = np.random.default_rng(0)
    weights = rng.integers(1, 100, size=200).astype(np.int64)
    order = rng.permutation(200).astype(np.int64)
    blocked = bytearray(200)
    print(f"{'kernel':<16}{'backend':<10}{'usec/call':>12}")
    for name in ("python", "cython"):
        try:
            k = kernels.backend(name)
        except ImportError:
            print(f"{'(all)':<16}{name:<10}{'not built':>12}")
            continue
        calls = {
            "split_gains": lambda: k.split_gains(D.X, D.y, rows, attrs, D.n_values, 2),
            "label_entropy": lambda: k.label_entropy(D.y, rows, 2),
            "fitting_items": lambda: k.fitting_items(order, weights, blocked, 500),
        }
        for kernel, fn in calls.items():
            best = min(timeit.repeat(fn, number=200, repeat=repeat)) / 200
            print(f"{kernel:<16}{name:<10}{best * 1e6:>12.1f}")


def end_to_end():
    print(f"\n{'backend':<10}{'tree dfs s':>12}{'knapsack s':>12}")
    for flag in ("1", "0"):
        env = dict(os.environ, DILEMMA_SEARCH_PURE_PYTHON=flag)
        out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True, text=True,
                             check=True).stdout.split()
        print(f"{out[0]:<10}{float(out[1]):>12.3f}{float(out[2]):>12.3f}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    kernel_timings(args.repeat)
    end_to_end()
