"""Timing comparison of the compiled kernels against the numpy fallback.

Run from the repository root:

    python benchmarks/bench_backends.py
"""
import time

import numpy as np

from heavypaths import _kernels_py
from heavypaths.cadlag import completed_graph
from heavypaths.coefficients import CoefModel
from heavypaths.harness import prelimit_marginals
from heavypaths.heavy_tail import TailModel

try:
    from heavypaths import _kernels
    BACKENDS = {"c": _kernels, "python": _kernels_py}
except ImportError:
    print("compiled extension not built; timing the fallback only")
    BACKENDS = {"python": _kernels_py}


def timeit(fn, repeat=3):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_fir():
    rng = np.random.default_rng(0)
    z = rng.standard_cauchy((64, 100_000 + 57))
    c = rng.random((64, 58))
    idx = np.array([100_000], dtype=np.int64)
    print("\nbatch_partial_stats: 64 reps x n=100000, 58 taps")
    for name, mod in BACKENDS.items():
        dt = timeit(lambda: mod.batch_partial_stats(z, c, idx))
        rate = 64 * 100_000 * 58 / dt / 1e9
        print(f"  {name:7s} {dt * 1e3:9.1f} ms   ({rate:.2f} Gmadd/s)")


def bench_cumsum():
    rng = np.random.default_rng(1)
    x = rng.standard_cauchy(2_000_000)
    print("\ncumsum_sq_compensated: 2e6 values")
    for name, mod in BACKENDS.items():
        dt = timeit(lambda: mod.cumsum_sq_compensated(x))
        print(f"  {name:7s} {dt * 1e3:9.1f} ms")


def bench_m2():
    rng = np.random.default_rng(2)

    def rand_segments(k):
        t = np.sort(rng.random(k))
        t = t[np.concatenate(([True], np.diff(t) > 1e-9))] if k else t
        v = rng.normal(0, 1, len(t)).cumsum()
        from heavypaths.cadlag import CadlagStep
        return completed_graph(CadlagStep(t, v, 0.0)).segments

    pairs = [(rand_segments(40), rand_segments(40)) for _ in range(200)]
    print("\ngraph_supinf: 200 random pairs, ~80 segments each, both sides")
    for name, mod in BACKENDS.items():
        def run():
            for a, b in pairs:
                mod.graph_supinf(a, b)
                mod.graph_supinf(b, a)
        dt = timeit(run)
        print(f"  {name:7s} {dt * 1e3:9.1f} ms")


def bench_pipeline():
    tail = TailModel(alpha=0.5, p=1.0)
    coef = CoefModel("geometric_random", a_low=0.5, a_high=2.0,
                     rho_low=0.3, rho_high=0.6)
    print("\nfull ensemble pipeline: 500 reps x n=20000 (sampling + filter + sums)")
    import heavypaths.backend as bk
    for name, mod in BACKENDS.items():
        bk.batch_partial_stats = mod.batch_partial_stats
        dt = timeit(lambda: prelimit_marginals(tail, coef, 20_000, 500, [1.0],
                                               seed=3), repeat=2)
        print(f"  {name:7s} {dt * 1e3:9.1f} ms")
    bk.batch_partial_stats = BACKENDS[next(iter(BACKENDS))].batch_partial_stats


if __name__ == "__main__":
    print(f"backends under test: {', '.join(BACKENDS)}")
    bench_fir()
    bench_cumsum()
    bench_m2()
    bench_pipeline()
