"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Prints one line per kernel with both timings, the speedup and the largest
absolute difference between the two backends' outputs.
"""
import argparse
import time

import numpy as np

from greedylab import _pykernels as py

try:
    from greedylab import _ckernels as cy
except ImportError:
    cy = None


def _best(fn, repeat):
    best, out = np.inf, None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def _diff(a, b):
    if isinstance(a, tuple):
        return max(_diff(u, v) for u, v in zip(a, b))
    return float(np.max(np.abs(np.asarray(a, float) - np.asarray(b, float))))


def cases():
    rng = np.random.default_rng(0)
    Y = rng.uniform(-1, 1, (20000, 64))
    yield "kt_norm_rows 20000x64", lambda k: k.kt_norm_rows(Y)

    n = 12
    x = rng.uniform(-1, 1, n)
    sets = [s for s in range(1 << n) if bin(s).count("1") <= 2]
    masks = np.array([[(s >> i) & 1 for i in range(n)] for s in sets], dtype=np.uint8)
    Y0 = np.where(masks.astype(bool), 0.0, x[None, :])
    step0 = 0.5 * float(py.kt_norm_rows(x[None, :])[0])
    yield (f"kt_chebyshev_rows n={n} rows={len(sets)}",
           lambda k: k.kt_chebyshev_rows(x, masks, Y0, 5, 2000, step0, 0.2)[:2])

    yield "extremal_sequence m=1e6", lambda k: k.extremal_sequence(4.0, 1.0, 10 ** 6, 4.0)
    seq = py.extremal_sequence(4.0, 1.1, 10 ** 6, 4.0)
    yield "power_bound_scan m=1e6", lambda k: k.power_bound_scan(seq, 4.0, 1.0, 1e-12)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if cy is None:
        print("compiled extension not built; only the fallback is available")
    print(f"{'kernel':40s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s} {'max diff':>10s}")
    for name, fn in cases():
        tp, op = _best(lambda: fn(py), args.repeat)
        if cy is None:
            print(f"{name:40s} {tp:10.4f}")
            continue
        tc, oc = _best(lambda: fn(cy), args.repeat)
        print(f"{name:40s} {tp:10.4f} {tc:10.4f} {tp / tc:8.1f} {_diff(op, oc):10.2e}")


if __name__ == "__main__":
    main()
