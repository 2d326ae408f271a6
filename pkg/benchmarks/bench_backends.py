#!/usr/bin/env python3
"""Benchmark the compiled kernel against the numpy fallback.

Both backends must produce bit-identical trial arrays; this script verifies
that on every run before timing them.

    python benchmarks/bench_backends.py --trials 1000000 --spins 1/2 2 3 15/2
"""

import argparse
import time

import numpy as np

from singletsim import DEFAULT_SEED, build_chain, parse_spin, unit_direction
from singletsim.backend import available_backends, simulate_trials

A = unit_direction(0.3, -0.5, 0.81, tol=1.0)
B = unit_direction(-0.4, 0.9, 0.17, tol=1.0)


def bench(chain, trials, backend, repeats):
    best = float("inf")
    arrays = None
    for _ in range(repeats):
        started = time.perf_counter()
        arrays = simulate_trials(chain, A, B, trials, seed=DEFAULT_SEED, backend=backend)
        best = min(best, time.perf_counter() - started)
    return best, arrays


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=1_000_000)
    parser.add_argument("--spins", nargs="+", default=["1/2", "2", "3", "15/2"])
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    backends = available_backends()
    print(f"backends: {', '.join(backends)}   trials per run: {args.trials}")
    header = f"{'spin':>6} " + "".join(f"{be + ' (s)':>14}" for be in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for text in args.spins:
        spin = parse_spin(text)
        chain = build_chain(spin)
        times = {}
        results = {}
        for be in backends:
            times[be], results[be] = bench(chain, args.trials, be, args.repeats)
        if len(backends) == 2:
            cy, py = results["cython"], results["python"]
            same = (
                np.array_equal(cy.alpha2, py.alpha2)
                and np.array_equal(cy.beta2, py.beta2)
                and np.array_equal(cy.cbits, py.cbits)
                and np.array_equal(cy.fbits, py.fbits)
            )
            if not same:
                raise SystemExit(f"backend outputs differ for spin {text}!")
        row = f"{text:>6} " + "".join(f"{times[be]:>14.3f}" for be in backends)
        if len(backends) == 2:
            row += f"{times['python'] / times['cython']:>9.2f}x"
        print(row)


if __name__ == "__main__":
    main()
