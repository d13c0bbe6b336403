"""Compare the compiled grid kernels with the pure numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py``. Prints the best of several
timings for each backend and the largest difference between their outputs.
"""
import argparse
import timeit

import numpy as np

from quadstab import _kernels_py

try:
    from quadstab import _kernels
except ImportError:
    _kernels = None


def bench(fn, args, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=501, help="grid points per axis")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _kernels is None:
        raise SystemExit("compiled extension not built; run pip install -e . --no-build-isolation")
    g = np.linspace(0.0, 1.0, args.n)
    d = np.linspace(-3.0, 3.0, args.n)
    cases = [
        ("two_mode_max_re", (d, 1.0, g)),
        ("three_mode_max_re", (1.5, 0.5, 1.0, g, g)),
        ("three_mode_max_re", (-1.5, 0.5, 1.0, g, g)),
    ]
    print(f"grid {args.n} x {args.n}")
    print(f"{'kernel':<20}{'compiled [s]':>14}{'numpy [s]':>12}{'speedup':>10}{'max |diff|':>12}")
    for name, a in cases:
        fc, fp = getattr(_kernels, name), getattr(_kernels_py, name)
        tc, tp = bench(fc, a, args.repeat), bench(fp, a, args.repeat)
        diff = np.abs(fc(*a) - fp(*a)).max()
        print(f"{name:<20}{tc:>14.4f}{tp:>12.4f}{tp / tc:>10.1f}{diff:>12.2e}")


if __name__ == "__main__":
    main()
