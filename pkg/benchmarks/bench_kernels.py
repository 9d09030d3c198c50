"""Compare the compiled and pure-Python GARCH kernels.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from procyc import kernels


def cases(rng):
    eps = rng.standard_normal((200, 2000))
    x = rng.standard_normal(100_000) * 0.5
    return {
        "simulate 200x2000": lambda b: kernels.garch11_simulate(eps, 0.01, 0.08, 0.9, 0.5,
                                                                backend=b),
        "filter 1e5": lambda b: kernels.garch11_filter(x, 0.01, 0.08, 0.9, 0.25, backend=b),
        "nll 1e5": lambda b: kernels.garch11_nll(x, 0.01, 0.08, 0.9, 0.25, backend=b),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = ["python"]
    try:
        kernels.get_backend("cython")
        backends.insert(0, "cython")
    except ImportError:
        print("compiled backend not built; timing python only")
    print(f"{'case':<20}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name, fn in cases(np.random.default_rng(0)).items():
        t = {b: min(timeit.repeat(lambda: fn(b), number=1, repeat=args.repeat)) for b in backends}
        if len(backends) == 2:
            same = all(np.array_equal(u, v) for u, v in
                       zip(np.atleast_1d(fn("cython")), np.atleast_1d(fn("python"))))
            assert same, f"{name}: backends disagree"
        row = f"{name:<20}" + "".join(f"{t[b] * 1e3:>10.2f}ms" for b in backends)
        if len(backends) == 2:
            row += f"{t['python'] / t['cython']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
