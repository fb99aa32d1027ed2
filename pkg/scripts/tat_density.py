"""Empirical density of TATs among random (K, f) draws.

    python scripts/tat_density.py --p 3 --n 4 --k-dims 0 1 2 --seeds 0-9 --budget 20

Prints one JSON line per (p, n, k_dim, seed) and a summary per (p, n, k_dim).
Draws whose centralizer search would exceed ABELAUT_BUDGET are reported, not run.
"""
from __future__ import annotations

import argparse
import json
from collections import defaultdict

from abelaut.tat import SearchSpaceTooLarge, SearchStats, search_tat


def seed_range(text: str) -> range:
    lo, _, hi = text.partition("-")
    return range(int(lo), int(hi or lo) + 1)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, nargs="+", default=[3])
    ap.add_argument("--n", type=int, nargs="+", default=[4])
    ap.add_argument("--k-dims", type=int, nargs="+", default=[0])
    ap.add_argument("--seeds", type=seed_range, default=range(0, 5))
    ap.add_argument("--budget", type=int, default=20)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    summary = defaultdict(lambda: {"runs": 0, "found": 0, "tested": 0})
    for p in args.p:
        for n in args.n:
            for k_dim in args.k_dims:
                key = (p, n, k_dim)
                for seed in args.seeds:
                    stats = SearchStats()
                    try:
                        t = search_tat(p, n, k_dim, seed, args.budget, args.workers, stats)
                    except SearchSpaceTooLarge as exc:
                        print(json.dumps({"p": p, "n": n, "k_dim": k_dim, "skipped": str(exc)}))
                        break
                    except ValueError as exc:
                        print(json.dumps({"p": p, "n": n, "k_dim": k_dim, "invalid": str(exc)}))
                        break
                    row = {"p": p, "n": n, "k_dim": k_dim, "seed": seed, "found": t is not None} | stats.to_json()
                    print(json.dumps(row))
                    s = summary[key]
                    s["runs"] += 1
                    s["found"] += t is not None
                    s["tested"] += stats.tested
    for (p, n, k_dim), s in summary.items():
        # every tested draw but the last of a successful run had a nontrivial centralizer
        rate = s["found"] / s["tested"] if s["tested"] else float("nan")
        print(json.dumps({"summary": [p, n, k_dim], **s, "success_per_injective_draw": round(rate, 4)}))


if __name__ == "__main__":
    main()
