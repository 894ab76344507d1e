"""Compare the compiled relay kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--symbols N] [--repeat R]
"""
import argparse
import time

import numpy as np

from pncsim import _kernels_py
from pncsim.signal import RandomStream

try:
    from pncsim import _ckernels
except ImportError:
    _ckernels = None


def _best(fn, y, h13, h23, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(y, h13, h23)
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--symbols", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    rng = RandomStream(0, "bench")
    y = 2.0 * (rng.normal(args.symbols) + 1j * rng.normal(args.symbols))
    h13, h23 = 1.78 + 0j, 0.89 + 1.54j
    print(f"{'kernel':<10} {'numpy s':>9} {'cython s':>9} {'speedup':>8} {'max|diff|':>10}")
    for name in ("map_pncf", "mmse_pncf", "mmse_pnci"):
        py = getattr(_kernels_py, name)
        tp = _best(py, y, h13, h23, args.repeat)
        if _ckernels is None:
            print(f"{name:<10} {tp:9.3f} {'n/a':>9}")
            continue
        cy = getattr(_ckernels, name)
        tc = _best(cy, y, h13, h23, args.repeat)
        diff = float(np.max(np.abs(py(y, h13, h23) - cy(y, h13, h23))))
        print(f"{name:<10} {tp:9.3f} {tc:9.3f} {tp / tc:8.2f} {diff:10.2e}")


if __name__ == "__main__":
    main()
