"""
Benchmark script for rsuplan performance testing.

This script performs various performance measurements on synthetic grids:
1. Pattern mining time across support thresholds
2. Minimal transversal enumeration
3. Coverage replay speed
4. Memory usage

Usage:
    python benchmark.py
"""

import gc
import statistics
import time
import tracemalloc
from contextlib import contextmanager

from rsuplan.coverage import build_hypergraph, minimal_transversals, spacov
from rsuplan.evaluator import SimConfig, simulate
from rsuplan.mining import MinSup, mine_patterns
from rsuplan.synth import grid_map, random_trajectories


@contextmanager
def measure_time(operation_name):
    """Measure and print the execution time of a code block."""
    start_time = time.time()
    yield
    end_time = time.time()
    print(f"{operation_name}: {(end_time - start_time) * 1000:.2f} ms")


@contextmanager
def measure_memory(operation_name):
    """Measure and print the memory usage of a code block."""
    tracemalloc.start()
    yield
    current, peak = tracemalloc.get_traced_memory()
    print(f"{operation_name} Memory: current={current / 1024:.1f} KB, peak={peak / 1024:.1f} KB")
    tracemalloc.stop()


def setup_benchmark_env(rows=6, cols=6, vehicles=200, seed=7):
    """Build a grid map and a fixed set of random walks over it."""
    road_map = grid_map(rows, cols)
    db = random_trajectories(road_map, vehicles, min_len=3, max_len=7, seed=seed)
    return road_map, db


def benchmark_mining(db, thresholds=("1/10", "1/20", "1/40"), iterations=3):
    """Benchmark the full pattern bundle at several support thresholds."""
    for threshold in thresholds:
        minsup = MinSup.parse(threshold)
        times = []
        for _ in range(iterations):
            gc.collect()
            start = time.time()
            result = mine_patterns(db, minsup, max_len=4)
            times.append((time.time() - start) * 1000)
        print(
            f"minsup {minsup}: {statistics.mean(times):.2f} ms "
            f"(FS={len(result.fs)}, MFS={len(result.mfs)}, AP={len(result.ap)})"
        )


def benchmark_transversals(db, minsup="1/20"):
    """Benchmark enumeration over the representative pattern hypergraph."""
    result = mine_patterns(db, MinSup.parse(minsup), max_len=4)
    h = build_hypergraph(result.ap)
    with measure_time(f"Transversals of {len(h.edges)} edges"):
        transversals = minimal_transversals(h, time_budget=0)
    print(f"  Found {len(transversals)}, smallest has {len(transversals[0])} junctions")


def benchmark_replay(road_map, db, iterations=20):
    """Benchmark the coverage replay for one plan."""
    plan = spacov(db, "1/20")
    cfg = SimConfig(communication_range=150.0)
    start = time.time()
    for _ in range(iterations):
        report = simulate(road_map, plan, db, cfg)
    elapsed = (time.time() - start) * 1000
    print(f"Replay ({iterations} iterations): {elapsed:.2f} ms")
    print(f"  Per replay: {elapsed / iterations:.4f} ms, coverage {report.coverage_ratio:.3f}")


def main():
    print("=" * 50)
    print("rsuplan Performance Benchmark")
    print("=" * 50)

    road_map, db = setup_benchmark_env()

    print("\n1. Pattern Mining")
    print("-" * 30)
    benchmark_mining(db)

    print("\n2. Minimal Transversals")
    print("-" * 30)
    benchmark_transversals(db)

    print("\n3. Coverage Replay")
    print("-" * 30)
    benchmark_replay(road_map, db)

    print("\n4. Memory Usage")
    print("-" * 30)
    with measure_memory("Overall"):
        plan = spacov(db, "1/20")
        simulate(road_map, plan, db)

    print("\nBenchmark completed.")


if __name__ == "__main__":
    main()
