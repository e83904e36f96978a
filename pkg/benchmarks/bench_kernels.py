"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

The first numba call (compilation) is excluded by a warm-up.
"""

import argparse
import time

import numpy as np

from pass_ma import _kernels
from pass_ma.channel import PhysicalConfig
from pass_ma.power import RateRequirements, power_coefficients


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    cfg = PhysicalConfig()
    k = (cfg.k0, cfg.kg, cfg.eta)
    rng = np.random.default_rng(0)
    xp = np.sort(rng.uniform(0, 15, (20000, 6)), axis=1)
    step = cfg.wavelength / 16
    xa = 4.0 + np.arange(400) * step
    xb = 10.0 + np.arange(400) * step
    coef = power_coefficients("noma", RateRequirements(), 2)
    xu, D = np.array([4.1, 10.2]), np.array([3.3, 4.0])
    grid = 5.0 + np.arange(60) * step

    cases = {
        "gain_batch 20000x6": lambda impl: impl.gain_batch(xp, 7.0, 3.5, *k),
        "pair_min_power 400x400": lambda impl: impl.pair_min_power(xa, xb, cfg.wavelength / 2, xu, D, *k, coef),
        "combo_max_gain n=3 60 pts": lambda impl: impl.combo_max_gain(grid, 3, cfg.wavelength / 2, 5.1, 3.0, *k),
    }
    impls = [_kernels.numpy_impl] + ([_kernels.numba_impl] if _kernels.HAVE_NUMBA else [])
    print(f"{'kernel':28s} " + " ".join(f"{i.name:>10s}" for i in impls) + "   speedup")
    for name, fn in cases.items():
        t = [best_of(lambda: fn(i), args.repeat) for i in impls]
        speed = f"{t[0] / t[1]:8.1f}x" if len(t) > 1 else "       -"
        print(f"{name:28s} " + " ".join(f"{v * 1e3:8.2f}ms" for v in t) + f"  {speed}")


if __name__ == "__main__":
    main()
