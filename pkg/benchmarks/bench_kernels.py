"""Compiled vs pure-numpy kernels on a preferential-attachment graph.

    python3 benchmarks/bench_kernels.py [--n 20000] [--mu 8] [--k 5]

The kernel rows time each variant directly on the round-3 groups of one
FFF run; the pipeline rows rerun the whole count in a subprocess with and
without CLIQUEMR_DISABLE_NUMBA.
"""
import argparse
import os
import subprocess
import sys
import time

import numpy as np

from cliquemr import _kernels
from cliquemr._jit import backend_name
from cliquemr.generators import generate_pa


def round3_groups(g, k):
    """Owner-grouped edges of every induced high-neighborhood with >= k-1 members."""
    offsets, ex, ey = [0], [], []
    out_ptr = g.out_indptr
    hi = g.edges[:, 1]
    for u in range(g.n):
        members = hi[out_ptr[u]:out_ptr[u + 1]]
        if len(members) < k - 1:
            continue
        inside = set(members.tolist())
        rows = [(x, y) for x in members for y in hi[out_ptr[x]:out_ptr[x + 1]] if y in inside]
        if not rows:
            continue
        ex.extend(r[0] for r in rows)
        ey.extend(r[1] for r in rows)
        offsets.append(offsets[-1] + len(rows))
    return (np.asarray(offsets, dtype=np.int64), np.asarray(ex, dtype=np.int64),
            np.asarray(ey, dtype=np.int64))


def best_of(fn, repeat=3):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def pipeline_seconds(n, mu, k, disable):
    env = dict(os.environ)
    if disable:
        env["CLIQUEMR_DISABLE_NUMBA"] = "1"
    else:
        env.pop("CLIQUEMR_DISABLE_NUMBA", None)
    code = ("import time;from cliquemr.generators import generate_pa;from cliquemr.exact import fff_count;"
            f"g=generate_pa({n},{mu},1);fff_count(g,3);t=time.perf_counter();"
            f"q=fff_count(g,{k}).q_k;print(q,time.perf_counter()-t)")
    q, t = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                          text=True, check=True).stdout.split()
    return int(q), float(t)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=20000)
    ap.add_argument("--mu", type=int, default=8)
    ap.add_argument("--k", type=int, default=5)
    args = ap.parse_args()
    if backend_name() != "numba":
        print("note: numba disabled in this process, the 'numba' rows run as plain Python")

    g = generate_pa(args.n, args.mu, 1)
    offsets, ex, ey = round3_groups(g, args.k)
    print(f"PA n={g.n} m={g.m} groups={len(offsets) - 1} group edges={len(ex)}")

    results = {}
    for name, fns in _kernels.VARIANTS.items():
        fns["count_groups"](offsets, ex, ey, args.k - 1, False)  # warm up / compile
        results[name] = fns["count_groups"](offsets, ex, ey, args.k - 1, False)[0].sum()
        t = best_of(lambda: fns["count_groups"](offsets, ex, ey, args.k - 1, False))
        print(f"count_groups  {name:6s} {t * 1000:9.1f} ms  q_{args.k}={results[name]}")
    members = np.ascontiguousarray(g.edges[:, 1])
    seg_offsets = g.out_indptr
    for name, fns in _kernels.VARIANTS.items():
        fns["segment_pairs"](seg_offsets, members)
        t = best_of(lambda: fns["segment_pairs"](seg_offsets, members))
        print(f"segment_pairs {name:6s} {t * 1000:9.1f} ms")
    assert results["numba"] == results["numpy"], results

    for disable in (False, True):
        q, t = pipeline_seconds(args.n, args.mu, args.k, disable)
        label = "numpy" if disable else "numba"
        print(f"fff_count     {label:6s} {t * 1000:9.1f} ms  q_{args.k}={q}")


if __name__ == "__main__":
    main()
