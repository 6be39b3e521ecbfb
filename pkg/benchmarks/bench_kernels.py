"""Time each hot kernel under numba and plain numpy on identical inputs.

    python3 benchmarks/bench_kernels.py [--n 4000000] [--repeat 5]
"""
import argparse
import time

import numpy as np

from g2qkd import kernels
from g2qkd._accel import HAVE_NUMBA

CDF = np.array([0.9628, 0.9991, 0.99999843])  # our-hBN cumulative weights


def inputs(n, rng):
    u = rng.random(n)
    events = kernels.NUMPY_KERNELS["events_inverse_cdf"](u, np.array([0.2, 0.95, 0.998]))
    photons = np.maximum(events, 1).astype(np.int16)
    a_idx = np.flatnonzero(rng.random(n) < 0.005)
    b_idx = np.flatnonzero(rng.random(n) < 0.005)
    return {
        "histogram_inverse_cdf": (u, CDF),
        "events_inverse_cdf": (u, CDF),
        "attack_events": (events, rng.random(n), 0.5, True),
        "thin_events": (events, rng.random(int(events.sum())), 0.1),
        "route_photons": (photons, rng.random(int(photons.sum())), 0.05, 0.05),
        "coincidences": (a_idx, b_idx, 500),
    }


def best_of(fn, args, repeat):
    fn(*args)  # warm-up, includes JIT compilation
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4_000_000, help="pulses per kernel call")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        raise SystemExit("numba is not installed")

    data = inputs(args.n, np.random.default_rng(0))
    print(f"{'kernel':<24}{'numba [ms]':>12}{'numpy [ms]':>12}{'speed-up':>10}")
    for name, call_args in data.items():
        t_nb = best_of(kernels.NUMBA_KERNELS[name], call_args, args.repeat)
        t_np = best_of(kernels.NUMPY_KERNELS[name], call_args, args.repeat)
        print(f"{name:<24}{1e3 * t_nb:>12.2f}{1e3 * t_np:>12.2f}{t_np / t_nb:>10.1f}")


if __name__ == "__main__":
    main()
