"""Time the compiled kernels against the numpy fallback.

Usage::

    python benchmarks/bench_kernels.py [--n 200000] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from curvcanon import _fallback

try:
    from curvcanon import _kernels
except ImportError:
    _kernels = None


def cases(n, rng):
    u = rng.normal(size=(n, 3)) + 1j * rng.normal(size=(n, 3))
    du = rng.normal(size=(n, 3)) + 1j * rng.normal(size=(n, 3))
    V = rng.normal(size=(n, 18))
    w = rng.uniform(size=n)
    c = rng.normal(size=(n // 20, 5)) + 1j * rng.normal(size=(n // 20, 5))
    return {
        "frame_curvature": ("frame_curvature", (u, du)),
        "weighted_column_sums": ("weighted_column_sums", (V, w)),
        "poly_roots (quartic fibres)": ("poly_roots", (c,)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    backends = [("python", _fallback)] + ([("compiled", _kernels)] if _kernels else [])
    print(f"{'kernel':30s} " + " ".join(f"{b:>12s}" for b, _ in backends) + "   speedup")
    for label, (name, call_args) in cases(args.n, rng).items():
        times = []
        for _, mod in backends:
            fn = getattr(mod, name)
            times.append(min(timeit.repeat(lambda: fn(*call_args), number=1, repeat=args.repeat)))
        speed = f"{times[0] / times[1]:8.1f}x" if len(times) > 1 else "       -"
        print(f"{label:30s} " + " ".join(f"{t * 1e3:10.2f}ms" for t in times) + "  " + speed)


if __name__ == "__main__":
    main()
