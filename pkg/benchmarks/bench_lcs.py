"""Compare the compiled LCS kernel against the pure-Python fallback.

The LCS length dominates evaluation time: relabeling one query scores every
parent chunk with ROUGE-L, and each score is one LCS over a few hundred
tokens.  Run from the repository root:

    python3 benchmarks/bench_lcs.py [--sizes 50,200,800] [--repeats 5]
"""

import argparse
import random
import statistics
import time

from lgmgc import LCS_BACKEND
from lgmgc.kernels import lcs_length_compiled, lcs_length_python

try:
    lcs_length_compiled([0], [0])
    lcs_compiled = lcs_length_compiled
except RuntimeError:
    lcs_compiled = None
lcs_python = lcs_length_python


def make_pair(rng, n, vocab=800):
    return (
        [rng.randrange(vocab) for _ in range(n)],
        [rng.randrange(vocab) for _ in range(n)],
    )


def bench(fn, pairs, repeats):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        for a, b in pairs:
            fn(a, b)
        times.append(time.perf_counter() - start)
    return min(times), statistics.median(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="50,200,800", help="token counts per side")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--pairs", type=int, default=20, help="sequence pairs per size")
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    rng = random.Random(0)
    print(f"active backend: {LCS_BACKEND}")
    if lcs_compiled is None:
        print("compiled kernel not built; showing the fallback only")
    header = f"{'tokens':>7}  {'python (ms)':>12}"
    if lcs_compiled is not None:
        header += f"  {'compiled (ms)':>14}  {'speedup':>8}"
    print(header)
    for n in sizes:
        pairs = [make_pair(rng, n) for _ in range(args.pairs)]
        py_best, _ = bench(lcs_python, pairs, args.repeats)
        row = f"{n:>7}  {1000 * py_best:>12.2f}"
        if lcs_compiled is not None:
            for a, b in pairs:
                assert lcs_compiled(a, b) == lcs_python(a, b)
            c_best, _ = bench(lcs_compiled, pairs, args.repeats)
            row += f"  {1000 * c_best:>14.2f}  {py_best / c_best:>7.1f}x"
        print(row)


if __name__ == "__main__":
    main()
