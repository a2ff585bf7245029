#!/usr/bin/env python3
"""Benchmark the compiled lane kernel against the pure-Python fallback.

Runs identical lanes on both backends, checks the results agree, and
reports throughput plus the end-to-end default-matrix wall time.

    python benchmarks/bench_lanesim.py [--beacons N] [--repeats N]
"""

import argparse
import time

from hetnet154 import engine
from hetnet154.devices import default_profiles
from hetnet154.platforms import PLATFORMS
from hetnet154.simulator import Scenario, lane_args, run_scenario


def bench_lanes(backend, lanes, repeats):
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        out = [backend.run_lane(**args) for args in lanes]
        best = min(best, time.perf_counter() - started)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--beacons", type=int, default=500)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    backends = {name: engine.load_backend(name)
                for name in engine.available_backends()}
    if "c" not in backends:
        print("note: compiled kernel not built; timing the fallback only")

    pset = default_profiles()
    scenario = Scenario(profiles=pset, beacons_per_run=args.beacons)
    lanes = [lane_args(scenario, tx, d, p, rep)
             for tx in PLATFORMS
             for d in scenario.distances_m
             for p in (6, 53, 96)
             for rep in range(3)]
    n_events = sum(a["n_beacons"] for a in lanes) * (1 + 2 * 4)

    print(f"{len(lanes)} lanes x {args.beacons} beacons "
          f"(~{n_events / 1e6:.1f}M events upper bound)")
    results = {}
    for name, backend in sorted(backends.items()):
        secs, out = bench_lanes(backend, lanes, args.repeats)
        results[name] = (secs, out)
        print(f"  {name:>2}: {secs:8.3f}s  "
              f"({len(lanes) * args.beacons / secs / 1e6:5.2f}M beacons/s)")
    if len(results) == 2:
        (c_secs, c_out), (py_secs, py_out) = results["c"], results["py"]
        match = all(tuple(a) == tuple(b)
                    for la, lb in zip(c_out, py_out) for a, b in zip(la, lb))
        print(f"  speedup: {py_secs / c_secs:.1f}x   results identical: "
              f"{'yes' if match else 'NO'}")
        if not match:
            raise SystemExit("backend results diverged")

    for name, backend in sorted(backends.items()):
        started = time.perf_counter()
        run_scenario(scenario, backend=backend)
        print(f"  full default matrix on {name:>2}: "
              f"{time.perf_counter() - started:6.2f}s")


if __name__ == "__main__":
    main()
