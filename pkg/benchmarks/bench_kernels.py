"""Compare the compiled and numpy SC kernels.

    python3 benchmarks/bench_kernels.py --n-list 10,12,14,16 --repeat 3
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from wompolar import kernels
from wompolar.polar import bit_reversal_perm, polar_transform
from wompolar.sc import leaf_arrays


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n-list", default="10,12,14,16")
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--batch", type=int, default=64, help="rows per genie_stats call")
    args = p.parse_args(argv)

    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)}")
    print(f"{'kernel':<12}{'N':>8}" + "".join(f"{b + ' (s)':>16}" for b in backends) + f"{'speedup':>10}")
    rng = np.random.default_rng(0)
    for n in (int(v) for v in args.n_list.split(",")):
        N = 1 << n
        y = (rng.random(N) >= 0.5).astype(np.uint8)
        info = (rng.random(N) < 0.4).astype(np.uint8)
        msg = rng.integers(0, 2, N).astype(np.uint8)
        unif = rng.random(N)
        q0, q1 = leaf_arrays(0.5, y)
        ys = (rng.random((args.batch, N)) >= 0.5).astype(np.uint8)
        us = polar_transform(((rng.random((args.batch, N)) >= 0.5) & (ys == 1)).astype(np.uint8))
        yr = ys[:, bit_reversal_perm(n)]

        rows = {"encode_pass": {}, "genie_stats": {}}
        for name in backends:
            k = kernels.get_backend(name)
            rows["encode_pass"][name] = best_of(lambda: k.encode_pass(q0, q1, info, msg, unif, False),
                                                args.repeat)
            rows["genie_stats"][name] = best_of(lambda: k.genie_stats(yr, us, 0.5), args.repeat)
        for kernel, t in rows.items():
            speed = t["python"] / t["cython"] if "cython" in t else float("nan")
            print(f"{kernel:<12}{N:>8}" + "".join(f"{t[b]:>16.5f}" for b in backends) + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()
