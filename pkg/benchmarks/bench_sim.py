"""Compare the compiled and pure-Python simulation backends.

Runs the same workload (same parameters, same seed) through both event
loops and reports events per second.  The two backends are exact twins,
so the event counts must agree; only the wall time differs.

Usage: python benchmarks/bench_sim.py [--horizon 200000] [--seed 11]
"""

import argparse
import time

from orbitq import HAVE_COMPILED, SystemParams, simulate


def run(backend, params, horizon, seed):
    start = time.perf_counter()
    traj = simulate(params, horizon, seed, sample_dt=horizon / 100.0,
                    backend=backend)
    elapsed = time.perf_counter() - start
    return traj.summary.n_events, elapsed


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--horizon", type=float, default=200000.0)
    ap.add_argument("--seed", type=int, default=11)
    args = ap.parse_args()

    params = SystemParams(0.15, 0.05, 0.01, 0.44, 0.25, 0.1)

    events_py, t_py = run("python", params, args.horizon, args.seed)
    print(f"python   backend: {events_py:10d} events in {t_py:8.3f}s "
          f"({events_py / t_py:12.0f} events/s)")

    if not HAVE_COMPILED:
        print("compiled backend not built; install with the Cython "
              "extension to compare")
        return

    events_c, t_c = run("compiled", params, args.horizon, args.seed)
    print(f"compiled backend: {events_c:10d} events in {t_c:8.3f}s "
          f"({events_c / t_c:12.0f} events/s)")

    if events_py != events_c:
        raise SystemExit("backend mismatch: event counts differ")
    print(f"speedup: {t_py / t_c:.1f}x")


if __name__ == "__main__":
    main()
