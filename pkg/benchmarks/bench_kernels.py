"""Time the compiled kernels against their numpy twins.

Run:  python3 benchmarks/bench_kernels.py [--d 300] [--n 20000] [--repeats 7]

Each kernel is timed on the same random inputs under both backends
(best of N repeats, after a warm-up call so JIT compilation is not
billed to the compiled path).  Results also sanity-check that the two
backends agree numerically.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from pseudosense import _kernels

KERNELS = ("soft_threshold_values", "threshold_split", "rms", "column_cosines")


def _time(fn, *args, repeats: int) -> float:
    fn(*args)  # warm-up: JIT compile / cache touch
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def _agree(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_agree(x, y) for x, y in zip(a, b))
    return np.allclose(a, b, rtol=1e-12, atol=1e-12, equal_nan=True)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=300)
    ap.add_argument("--n", type=int, default=20000)
    ap.add_argument("--repeats", type=int, default=7)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    m = rng.standard_normal((args.d, args.n))
    v = rng.standard_normal(args.d)
    v /= np.linalg.norm(v)
    calls = {
        "soft_threshold_values": (m, 0.05),
        "threshold_split": (m, 0.03),
        "rms": (m,),
        "column_cosines": (np.asfortranarray(m), v),
    }

    try:
        _kernels.set_backend("numba")
    except ImportError as err:
        print(f"numba backend unavailable ({err}); nothing to compare")
        return 1

    print(f"matrix {args.d}x{args.n}, best of {args.repeats}")
    print(f"{'kernel':<24}{'numpy (ms)':>12}{'numba (ms)':>12}{'speedup':>9}")
    for name in KERNELS:
        fn = getattr(_kernels, name)
        _kernels.set_backend("numba")
        t_nb = _time(fn, *calls[name], repeats=args.repeats)
        out_nb = fn(*calls[name])
        _kernels.set_backend("numpy")
        t_np = _time(fn, *calls[name], repeats=args.repeats)
        out_np = fn(*calls[name])
        tag = "" if _agree(out_nb, out_np) else "  MISMATCH"
        print(
            f"{name:<24}{1e3 * t_np:>12.3f}{1e3 * t_nb:>12.3f}"
            f"{t_np / t_nb:>8.2f}x{tag}"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
