"""Compare the compiled and pure-Python refinement kernels.

    python benchmarks/bench_refine.py [--repeat 3] [--random 20000]

Inputs are closures of the bundled reduction corpus plus one random LTS.
Both backends must return identical partitions; the script exits 1 otherwise.
"""
from __future__ import annotations

import argparse
import random
import sys
import time
from pathlib import Path

from branchbpa import _kernels_py
from branchbpa.equivalence import build_closure
from branchbpa.reductions import parse_hor, parse_qsat, reduce_hor, reduce_qsat

try:
    from branchbpa import _kernels as _kernels_cy
except ImportError:
    _kernels_cy = None

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def corpus_inputs():
    picks = [("hor", "g07_five.hor"), ("hor", "g04_run.hor"), ("qsat", "f08_three.qsat"), ("qsat", "f11_four.qsat")]
    for kind, name in picks:
        text = (CORPUS / kind / name).read_text()
        out = reduce_hor(parse_hor(text)) if kind == "hor" else reduce_qsat(parse_qsat(text))
        lts = build_closure(out.system, [out.left, out.right])
        lbl, tau = lts.label_ids()
        yield name, (len(lts), list(lts.src), list(lbl), list(lts.dst), tau)


def random_input(n, seed=0):
    rng = random.Random(seed)
    m = 3 * n
    return n, [rng.randrange(n) for _ in range(m)], [rng.randrange(4) for _ in range(m)], \
        [rng.randrange(n) for _ in range(m)], 3


def best_of(fn, args, repeat):
    best, result = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t)
    return best, list(result)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--random", type=int, default=20000, help="states in the random LTS")
    args = ap.parse_args(argv)
    if _kernels_cy is None:
        print("compiled kernels not built; run `pip install --no-build-isolation -e .` first")
        return 1
    inputs = list(corpus_inputs()) + [(f"random-{args.random}", random_input(args.random))]
    print(f"{'input':<18}{'states':>8}{'edges':>9}  {'mode':<10}{'python s':>10}{'cython s':>10}{'speedup':>9}")
    bad = 0
    for name, (n, src, lbl, dst, tau) in inputs:
        for branching in (True, False):
            a = (n, src, lbl, dst, tau, branching)
            tp, rp = best_of(_kernels_py.refine_partition, a, args.repeat)
            tc, rc = best_of(_kernels_cy.refine_partition, a, args.repeat)
            bad += rp != rc
            mode = "branching" if branching else "strong"
            print(f"{name:<18}{n:>8}{len(src):>9}  {mode:<10}{tp:>10.4f}{tc:>10.4f}{tp / max(tc, 1e-9):>8.1f}x")
    if bad:
        print(f"{bad} partitions differ between backends")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
