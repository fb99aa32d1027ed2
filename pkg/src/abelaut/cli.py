"""Command line interface.

    abelaut tat search --p 3 --n 4 --k-dim 0 --seed 7 --budget 500 -o tat.json
    abelaut tat verify tat.json
    abelaut group build --construction zurek tat.json -o g.json
    abelaut group analyze g.json
    abelaut aut verify g.json
    abelaut paper-check --p 3 --n 4

Exit codes: 0 success, 1 claim or verification failure, 2 usage or
precondition error, 3 search budget exhausted.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from math import comb
from pathlib import Path

from . import constructions as cons
from .autos import Inconclusive, certify
from .group import PcPresentation, lattice_relation
from .tat import InvalidTat, SearchStats, SearchSpaceTooLarge, TatCandidate, check_tat, search_tat

log = logging.getLogger("abelaut")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_EXHAUSTED = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    p: int = 3
    n: int = 4
    k_dim: int = 0
    m: int = 2
    seed: int = 7
    budget: int = 500
    workers: int = 1
    input: str | None = None
    output: str | None = None
    format: str = "text"
    construction: str | None = None

    def validate(self) -> None:
        from .gf import check_prime

        try:
            check_prime(self.p)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if self.n < 4:
            raise UsageError(f"--n must be at least 4, got {self.n}")
        if self.k_dim < 0 or comb(self.n, 2) - self.k_dim < self.n:
            raise UsageError(f"--k-dim {self.k_dim} leaves no room for an injective f")
        if self.m <= 1:
            raise UsageError(f"--m must be > 1, got {self.m}")
        if self.budget < 0 or self.workers < 1:
            raise UsageError("--budget must be >= 0 and --workers >= 1")


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _load_tat(path: str) -> TatCandidate:
    data = _load_json(path)
    try:
        return TatCandidate.from_json(data)
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"malformed TAT file {path}: {exc}") from None


def _load_group(path: str) -> PcPresentation:
    data = _load_json(path)
    try:
        return PcPresentation.from_json(data)
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"malformed group file {path}: {exc}") from None


def _emit(cfg: RunConfig, data: dict, text: str) -> None:
    body = json.dumps(data, indent=2, sort_keys=True)
    if cfg.output:
        Path(cfg.output).write_text(body + "\n", encoding="utf-8")
    if cfg.format == "json" and not cfg.output:
        print(body)
    else:
        print(text)


# --- commands ------------------------------------------------------------------


def cmd_tat_search(cfg: RunConfig) -> int:
    cfg.validate()
    stats = SearchStats()
    t = search_tat(cfg.p, cfg.n, cfg.k_dim, cfg.seed, cfg.budget, cfg.workers, stats)
    if t is None:
        print(f"no TAT found within budget {cfg.budget}: {json.dumps(stats.to_json())}", file=sys.stderr)
        return EXIT_EXHAUSTED
    data = t.to_json()
    _emit(cfg, data, f"found TAT after {stats.attempts} draw(s) ({stats.nontrivial} with nontrivial centralizer)")
    return EXIT_OK


def tat_report(t: TatCandidate, workers: int) -> tuple[dict, bool]:
    v = check_tat(t, workers=workers, full=True)
    data = {
        "p": t.p,
        "n": t.n,
        "dim_k": t.t,
        "conditions": {
            "1_dimension": v.dimension,
            "2_wedge": v.wedge_condition,
            "3_injective": v.injective,
            "4_trivial_centralizer": v.trivial_centralizer,
        },
        "centralizer": None if v.centralizer is None else v.centralizer.to_json(),
        "is_tat": v.ok,
    }
    return data, v.ok


def cmd_tat_verify(cfg: RunConfig) -> int:
    t = _load_tat(cfg.input)
    data, ok = tat_report(t, cfg.workers)
    lines = [f"TAT check p={t.p} n={t.n} dim K={t.t}"]
    for name, val in data["conditions"].items():
        lines.append(f"  ({name[0]}) {name[2:]:<20} {'skipped' if val is None else ('pass' if val else 'FAIL')}")
    if data["centralizer"]:
        lines.append(f"  centralizer count: {data['centralizer']['count']}")
    _emit(cfg, data, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_group_build(cfg: RunConfig) -> int:
    cfg.validate()
    t = _load_tat(cfg.input)
    try:
        g = cons.build(cfg.construction, t, m=cfg.m, workers=cfg.workers)
    except (InvalidTat, cons.AmalgamObstruction, cons.BadGamma, ValueError) as exc:
        print(f"cannot build {cfg.construction}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(cfg, g.to_json(), f"built {cfg.construction} group of order {g.p}^{g.log_order}")
    return EXIT_OK


def group_report(g: PcPresentation) -> dict:
    p = g.p
    g1, phi, z, agemo = g.derived_subgroup(), g.frattini(), g.center(), g.agemo()

    def size(s):
        return f"{p}^{s.log_order}"

    report = {
        "construction": g.construction,
        "|G|": f"{p}^{g.log_order}",
        "|G'|": size(g1),
        "|Z(G)|": size(z),
        "|Phi(G)|": size(phi),
        "|G^p|": size(agemo),
        "|Omega_1(G)|": size(g.omega(1)),
        "|Omega_2(G)|": size(g.omega(2)),
        "lattice": lattice_relation(g),
        "is_special": g.is_special(),
        "purely_nonabelian_certificate": g.is_purely_nonabelian_certificate(),
    }
    return report


def cmd_group_analyze(cfg: RunConfig) -> int:
    g = _load_group(cfg.input)
    report = group_report(g)
    text = "\n".join(f"  {k:<32} {v}" for k, v in report.items())
    _emit(cfg, report, text)
    claims = cons.claim_sheet(g.construction) if g.construction in cons.TAGS else None
    if claims and report["lattice"] != claims.lattice:
        return EXIT_FAIL
    return EXIT_OK


def cmd_aut_verify(cfg: RunConfig) -> int:
    g = _load_group(cfg.input)
    if "tat" not in g.meta or g.construction not in cons.TAGS:
        raise UsageError("aut verify needs a group built by 'group build'")
    try:
        cert = certify(g, workers=cfg.workers)
    except Inconclusive as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_FAIL
    data = cert.to_json()
    text = (
        f"  construction     {cert.construction}\n"
        f"  Aut(G) = Aut_c   {cert.aut_equals_autc}\n"
        f"  structure        {cert.structure}\n"
        f"  |Aut_c(G)|       {data['autc_order']}\n"
        f"  method           {cert.method}"
    )
    _emit(cfg, data, text)
    claims = cons.claim_sheet(g.construction)
    ok = cert.aut_equals_autc == claims.aut_equals_autc and cert.structure == claims.aut_structure
    return EXIT_OK if ok else EXIT_FAIL


def claim_check(t: TatCandidate, m: int = 2, workers: int = 1) -> list[dict]:
    """Every claim for every construction, as a list of ``{claim, expected, got, ok}``."""
    rows = []

    def claim(name, expected, got):
        rows.append({"claim": name, "expected": expected, "got": got, "ok": expected == got})

    _, ok = tat_report(t, workers)
    claim("TAT conditions (1)-(4)", True, ok)
    if not ok:
        return rows
    n, p = t.n, t.p
    d = comb(n, 2) - t.t
    for tag in cons.TAGS:
        g = cons.build(tag, t, m=m, check=False)
        sheet = cons.claim_sheet(tag)
        claim(f"{tag}: lattice", sheet.lattice, lattice_relation(g))
        if sheet.purely_nonabelian_certificate is not None:
            claim(f"{tag}: Z(G) <= Phi(G)", True, g.is_purely_nonabelian_certificate())
        if tag == cons.SPECIAL:
            claim("special: is special", True, g.is_special())
            claim("special: G' = Omega_1", True, g.derived_subgroup() == g.omega(1))
            claim("special: |G/G'| = |G^p| = p^n", [n, n], [g.log_order - g.derived_subgroup().log_order, g.agemo().log_order])
        try:
            cert = certify(g, workers=workers)
        except Inconclusive as exc:
            claim(f"{tag}: structure", sheet.aut_structure, f"inconclusive: {exc}")
            continue
        claim(f"{tag}: Aut = Aut_c", True, cert.aut_equals_autc)
        claim(f"{tag}: structure", sheet.aut_structure, cert.structure)
        if tag == cons.SPECIAL:
            claim("special: |Aut_c| exponent = n * dim(Lambda^2 V / K)", n * d, cert.autc_log_order)
    return rows


def cmd_claim_check(cfg: RunConfig) -> int:
    if cfg.input:
        t = _load_tat(cfg.input)
    else:
        cfg.validate()
        stats = SearchStats()
        t = search_tat(cfg.p, cfg.n, cfg.k_dim, cfg.seed, cfg.budget, cfg.workers, stats)
        if t is None:
            print(f"no TAT found within budget {cfg.budget}", file=sys.stderr)
            return EXIT_EXHAUSTED
    rows = claim_check(t, cfg.m, cfg.workers)
    ok = all(r["ok"] for r in rows)
    data = {
        "tat": t.to_json(),
        "claims": rows,
        "all_pass": ok,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    lines = [f"{'PASS' if r['ok'] else 'FAIL'}  {r['claim']}: {r['got']}" for r in rows]
    _emit(cfg, data, "\n".join(lines))
    if not ok:
        first = next(r for r in rows if not r["ok"])
        print(f"first failed claim: {first['claim']} (expected {first['expected']}, got {first['got']})", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# --- argument parsing ------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=("json", "text"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="abelaut", description="p-groups whose automorphisms are all central")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="area", required=True)

    tat = sub.add_parser("tat").add_subparsers(dest="action", required=True)
    s = tat.add_parser("search")
    s.add_argument("--p", type=int, default=3)
    s.add_argument("--n", type=int, default=4)
    s.add_argument("--k-dim", type=int, default=0)
    s.add_argument("--seed", type=int, default=7)
    s.add_argument("--budget", type=int, default=500)
    _common(s)
    v = tat.add_parser("verify")
    v.add_argument("input")
    _common(v)

    group = sub.add_parser("group").add_subparsers(dest="action", required=True)
    b = group.add_parser("build")
    b.add_argument("input")
    b.add_argument("--construction", choices=cons.TAGS, default=cons.SPECIAL)
    b.add_argument("--m", type=int, default=2)
    _common(b)
    a = group.add_parser("analyze")
    a.add_argument("input")
    _common(a)

    aut = sub.add_parser("aut").add_subparsers(dest="action", required=True)
    av = aut.add_parser("verify")
    av.add_argument("input")
    _common(av)

    pc = sub.add_parser("paper-check")
    pc.add_argument("--p", type=int, default=3)
    pc.add_argument("--n", type=int, default=4)
    pc.add_argument("--k-dim", type=int, default=0)
    pc.add_argument("--m", type=int, default=2)
    pc.add_argument("--seed", type=int, default=7)
    pc.add_argument("--budget", type=int, default=500)
    pc.add_argument("--tat", dest="input", help="use this TAT file instead of searching")
    _common(pc)
    return parser


_COMMANDS = {
    ("tat", "search"): cmd_tat_search,
    ("tat", "verify"): cmd_tat_verify,
    ("group", "build"): cmd_group_build,
    ("group", "analyze"): cmd_group_analyze,
    ("aut", "verify"): cmd_aut_verify,
    ("paper-check", None): cmd_claim_check,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    action = getattr(args, "action", None)
    fields = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    cfg = RunConfig(command=f"{args.area} {action or ''}".strip(), **fields)
    try:
        return _COMMANDS[(args.area, action)](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SearchSpaceTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
