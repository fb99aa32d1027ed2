"""Wall-clock of the full centralizer search over GL(n, p).

    python scripts/bench_centralizer.py --workers 1 2 4 8

Runs the f = 0 search (every matrix survives, the worst case) and the search
for a TAT found by seed 7, for each worker count.
"""
from __future__ import annotations

import argparse
import json
import os
import time

import numpy as np

from abelaut.tat import TatCandidate, centralizer, search_tat


def timed(t: TatCandidate, workers: int) -> dict:
    start = time.perf_counter()
    rep = centralizer(t, workers=workers, check=False, cap=0)
    return {"count": rep.count, "seconds": round(time.perf_counter() - start, 2)}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--workers", type=int, nargs="+", default=[1])
    args = ap.parse_args()
    zero = TatCandidate.build(args.p, args.n, np.zeros((args.n, args.n * (args.n - 1) // 2), int))
    tat = search_tat(args.p, args.n, 0, seed=7)
    print(json.dumps({"cpu_count": os.cpu_count()}))
    for w in args.workers:
        row = {"workers": w, "f_zero": timed(zero, w)}
        if tat is not None:
            row["tat"] = timed(tat, w)
        print(json.dumps(row))


if __name__ == "__main__":
    main()
