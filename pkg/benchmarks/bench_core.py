"""Compare the compiled KDE core with the numpy fallback.

Usage: python3 benchmarks/bench_core.py [--repeat 5]
"""
import argparse
import os
import subprocess
import sys
import time

import numpy as np

from divest import _backend, _fallback
from divest.kernels import legendre_kernel


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_kde_sum(repeat):
    rng = np.random.default_rng(0)
    print(f"{'case':<28} {'numpy [ms]':>11} {'compiled [ms]':>14} {'speedup':>8}")
    for d, n, q, h in ((1, 4000, 2048, 0.19), (1, 16000, 2048, 0.14), (2, 2000, 65536, 0.28), (2, 4000, 4000, 0.25)):
        xs = rng.random((n, d))
        xs = xs[np.argsort(xs[:, 0], kind="stable")]
        qs = rng.random((q, d))
        c = legendre_kernel(1).coeffs
        t_np = best_of(lambda: _fallback.kde_sum(xs, qs, c, h), repeat)
        if _backend.BACKEND == "compiled":
            from divest import _core

            t_c = best_of(lambda: _core.kde_sum(xs, qs, c, h), repeat)
            print(f"d={d} n={n:<6} q={q:<7} {t_np * 1e3:>11.1f} {t_c * 1e3:>14.1f} {t_np / t_c:>7.1f}x")
        else:
            print(f"d={d} n={n:<6} q={q:<7} {t_np * 1e3:>11.1f} {'n/a':>14} {'':>8}")


SNIPPET = """
import time
from divest.densities import cosine_density, sample
from divest.estimators import EstimatorConfig, estimate
X, Y = sample(cosine_density(0.5), 8000, 1), sample(cosine_density(0.3), 8000, 2)
for kind in ("plugin", "linear", "quadratic"):
    cfg = EstimatorConfig(estimator=kind, kappa_l=0.3, kappa_u=3.0)
    times = []
    for _ in range({r}):
        t0 = time.perf_counter()
        estimate(X, Y, cfg)
        times.append(time.perf_counter() - t0)
    print(kind, min(times))
"""


def bench_estimators(repeat):
    # each backend runs in its own interpreter, since the choice is made at import
    out = {}
    for name, env in (("numpy", {"DIVEST_PURE": "1"}), ("compiled", {})):
        res = subprocess.run([sys.executable, "-c", SNIPPET.format(r=repeat)], env={**os.environ, **env},
                             capture_output=True, text=True, check=True)
        out[name] = dict(line.split() for line in res.stdout.splitlines())
    print(f"\n{'estimator (d=1, n=8000)':<28} {'numpy [ms]':>11} {'compiled [ms]':>14} {'speedup':>8}")
    for kind in ("plugin", "linear", "quadratic"):
        a, b = float(out["numpy"][kind]), float(out["compiled"][kind])
        print(f"{kind:<28} {a * 1e3:>11.1f} {b * 1e3:>14.1f} {a / b:>7.1f}x")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    print(f"active backend: {_backend.BACKEND}\n")
    bench_kde_sum(args.repeat)
    bench_estimators(args.repeat)


if __name__ == "__main__":
    main()
