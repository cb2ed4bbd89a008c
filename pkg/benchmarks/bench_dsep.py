"""Time the d-separation kernels under both backends.

    python3 benchmarks/bench_dsep.py [--fixture network2] [--masks 2000] [--repeat 3]

Both backends are loaded in the same process (``_kernels.python_impl`` and
``_kernels.numba_impl``), so FCIREPAIR_NUMBA does not need to be toggled.
Results are checked for equality before timings are reported.
"""

import argparse
import sys
import time

import numpy as np

from fcirepair import _kernels
from fcirepair.fixtures import FIXTURES, fixture


def random_masks(dag, count, rng, max_size=6):
    visible = np.array([dag.index[v] for v in dag.sorted_visible()])
    masks = np.zeros((count, len(dag.nodes)), dtype=np.bool_)
    for row in masks:
        row[rng.choice(visible, size=rng.integers(0, max_size + 1), replace=False)] = True
    return masks


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fixture", choices=sorted(FIXTURES), default="network2")
    ap.add_argument("--masks", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if _kernels.numba_impl is None:
        print("numba is not installed; nothing to compare", file=sys.stderr)
        return 1
    dag = fixture(args.fixture)
    csr = dag._csr
    masks = random_masks(dag, args.masks, np.random.default_rng(args.seed))
    source = dag.index[dag.sorted_visible()[0]]

    t0 = time.perf_counter()
    _kernels.numba_impl.reachable_batch(*csr, source, masks[:1])
    compile_s = time.perf_counter() - t0

    rows = []
    results = {}
    for name, impl in (("python", _kernels.python_impl), ("numba", _kernels.numba_impl)):
        single, _ = best_of(
            lambda impl=impl: [impl.reachable(*csr, source, m) for m in masks[:200]],
            args.repeat,
        )
        batch, out = best_of(
            lambda impl=impl: impl.reachable_batch(*csr, source, masks), args.repeat
        )
        results[name] = out
        rows.append((name, single / 200 * 1e6, batch / len(masks) * 1e6))

    if not np.array_equal(results["python"], results["numba"]):
        print("backends disagree", file=sys.stderr)
        return 1

    print(f"fixture {args.fixture}: {len(dag.nodes)} nodes, {len(dag.edges)} edges, "
          f"{len(masks)} masks; numba compile {compile_s:.2f} s")
    print(f"{'backend':8} {'single us/query':>16} {'batch us/query':>15}")
    for name, single_us, batch_us in rows:
        print(f"{name:8} {single_us:16.1f} {batch_us:15.1f}")
    speed = rows[0][2] / rows[1][2]
    print(f"batched speedup: {speed:.0f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
