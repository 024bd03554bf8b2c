"""Time the numba and numpy kernel backends on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 5] [--size 200000]

The first numba call includes compilation (or a cache load); it is timed
separately and excluded from the steady-state numbers.
"""

import argparse
import time

import numpy as np

from sfl import catalog, kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(size):
    g2 = catalog.system("group2")
    s3 = catalog.system("sierpinski2")
    Bm = np.array([[float(x) for x in b] for b in g2.B])
    Rsi = g2.R_star_inv.to_float()
    rng = np.random.default_rng(0)
    T = rng.uniform(-200, 200, size=(size, 2))
    Bs = np.array([[float(x) for x in b] for b in s3.B])
    Rinv = s3.R.inv().to_float()

    def attractor(impl):
        return impl.attractor(Rinv, Bs, 10)

    P = kernels.implementations()["numpy"].attractor(Rinv, Bs, 10)
    w = np.full(len(P), 1.0 / len(P))
    Tsmall = T[:200]
    box = (P[:, 0].min(), P[:, 0].max() + 1e-9, P[:, 1].min(), P[:, 1].max() + 1e-9)
    return {
        f"mask_batch ({size} pts)": lambda impl: impl.mask_batch(T, Bm),
        f"muhat_batch ({size} pts)": lambda impl: impl.muhat_batch(T, Rsi, Bm, 1e-9, 200),
        f"attractor (3^11 = {len(P)} pts)": attractor,
        f"bin_points ({len(P)} pts, 1024^2)": lambda impl: impl.bin_points(P, *box, 1024, 1024),
        f"discrete_transform ({len(P)} x 200)": lambda impl: impl.discrete_transform(P, w, Tsmall),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=int, default=200_000)
    args = ap.parse_args()
    impls = kernels.implementations()
    if "numba" not in impls:
        print("numba is not importable; only the numpy backend is timed")
    print(f"active backend: {kernels.BACKEND}")
    header = f"{'kernel':40s} " + " ".join(f"{name:>12s}" for name in impls) + "   speedup"
    print(header)
    print("-" * len(header))
    for label, fn in cases(args.size).items():
        row = {}
        for name, impl in impls.items():
            if name == "numba":
                t0 = time.perf_counter()
                fn(impl)  # compile or load from cache
                warm = time.perf_counter() - t0
            row[name] = best_of(lambda: fn(impl), args.repeat)
        speed = row["numpy"] / row["numba"] if "numba" in row else float("nan")
        print(f"{label:40s} " + " ".join(f"{row[n] * 1e3:10.2f}ms" for n in impls) + f"   {speed:6.1f}x")
    if "numba" in impls:
        print(f"(last numba first-call time incl. compile/cache load: {warm * 1e3:.1f} ms)")


if __name__ == "__main__":
    main()
