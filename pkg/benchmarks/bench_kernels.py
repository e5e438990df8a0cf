"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeats 7]

Each pair is checked for identical output before it is timed.
"""
import argparse
import statistics
import time

import numpy as np

from dying_channels import FiniteUniform, Geometric, StrassenModel
from dying_channels import kernels


def _median_time(fn, repeats):
    fn()  # compile / warm caches
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def _cases():
    m = StrassenModel.bsc(0.01, 1e-3)
    d = Geometric(0.02)
    for N in (200, 1000):
        surv, logm = d.survival_array(N + 1), m.table(N + 1)
        yield f"dp_backward N={N}", kernels.dp_backward_numba, kernels.dp_backward_numpy, \
            (surv, logm, N)
    u = FiniteUniform(2, 40)
    for N in (16, 20):
        surv, logm = u.survival_array(N), m.table(N)
        yield f"exhaustive N={N}", kernels.exhaustive_numba, kernels.exhaustive_numpy, \
            (surv, logm, N)
    rng = np.random.default_rng(0)
    deaths = d.sample(2_000_000, rng)
    bounds = np.cumsum(np.full(40, 18, dtype=np.int64))
    yield "completed_hist 2e6 trials", kernels.completed_hist_numba, \
        kernels.completed_hist_numpy, (deaths, bounds)


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=7)
    args = ap.parse_args()
    if kernels.numba is None:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'kernel':<28}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for name, fast, slow, inputs in _cases():
        if not _same(fast(*inputs), slow(*inputs)):
            raise SystemExit(f"{name}: backends disagree")
        t_fast = _median_time(lambda: fast(*inputs), args.repeats)
        t_slow = _median_time(lambda: slow(*inputs), args.repeats)
        print(f"{name:<28}{t_fast * 1e3:>12.3f}{t_slow * 1e3:>12.3f}{t_slow / t_fast:>9.1f}x")


if __name__ == "__main__":
    main()
