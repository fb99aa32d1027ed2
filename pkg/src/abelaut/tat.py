"""Trivial Automorphism Triples (V, K, f) and the exhaustive centralizer search.

A candidate consists of a subspace K of the exterior square of V = GF(p)^n and
a linear map f from V to the quotient by K, stored as an ``n x C(n,2)`` matrix
whose rows are canonical coset representatives.  It is a TAT when

1. ``n >= 4``;
2. ``v ^ V`` is not inside K for any nonzero v;
3. f is injective;
4. the only ``alpha`` in GL(V) with ``K alpha^ = K`` and
   ``alpha f = f alpha^ (mod K)`` is the identity.
"""
from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import gf
from .wedge import (
    QuotientSpace,
    batch_wedge,
    check_wedge_condition,
    induced_map,
    pairs,
    transform_subspace,
    wedge_dim,
    wedge_tensor,
)

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**10
SCHEMA = 1


class SearchSpaceTooLarge(RuntimeError):
    pass


class InvalidTat(ValueError):
    pass


def search_budget() -> int:
    """GL enumeration budget; ``ABELAUT_BUDGET`` overrides the default."""
    return int(float(os.environ.get("ABELAUT_BUDGET", DEFAULT_BUDGET)))


@dataclass(frozen=True, eq=False)
class TatCandidate:
    p: int
    n: int
    k: QuotientSpace
    f: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.f, dtype=np.int64)
        if f.shape != (self.n, wedge_dim(self.n)):
            raise ValueError(f"f must have shape ({self.n}, {wedge_dim(self.n)}), got {f.shape}")
        if (self.k.n, self.k.p) != (self.n, self.p):
            raise ValueError("K lives in a different exterior square")
        f = self.k.project(f)
        f.setflags(write=False)
        object.__setattr__(self, "f", f)

    @classmethod
    def build(cls, p: int, n: int, f, k_basis=()) -> "TatCandidate":
        p = gf.check_prime(p)
        return cls(p, n, QuotientSpace.of(n, p, k_basis), np.asarray(f))

    @property
    def t(self) -> int:
        return self.k.dim_k

    def __eq__(self, other) -> bool:
        if not isinstance(other, TatCandidate):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.f, other.f)

    def __hash__(self) -> int:
        return hash((self.k, self.f.tobytes()))

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "p": self.p,
            "n": self.n,
            "wedge_order": "lex",
            "k_basis": gf.to_json(self.k.basis),
            "f_rows": gf.to_json(self.f),
        }

    @classmethod
    def from_json(cls, data: dict) -> "TatCandidate":
        if data.get("wedge_order", "lex") != "lex":
            raise ValueError("only the lexicographic wedge order is supported")
        n = int(data["n"])
        k_basis = np.asarray(data.get("k_basis", []), dtype=np.int64).reshape(-1, wedge_dim(n))
        return cls.build(int(data["p"]), n, data["f_rows"], k_basis)


def verify_injective(t: TatCandidate) -> bool:
    return gf.rank(t.f, t.p) == t.n


# --- centralizer -------------------------------------------------------------


@dataclass
class CentralizerReport:
    count: int
    elements: list[np.ndarray]
    search_space: int
    elapsed: float
    complete: bool = True
    workers: int = 1

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "complete": self.complete,
            "search_space": self.search_space,
            "elements": [gf.to_json(a) for a in self.elements],
            "elapsed": round(self.elapsed, 3),
        }


@dataclass(frozen=True)
class SwitchProblem:
    """Solve ``alpha f = f alpha^`` modulo ``modulus`` over GL(n, p), keeping
    only ``alpha`` whose induced map preserves every subspace in ``invariant``.

    With ``modulus = invariant = (K,)`` this is condition (4) of a TAT; the
    block computations for the derived groups use a larger modulus.
    """

    p: int
    n: int
    f: np.ndarray
    modulus: QuotientSpace
    invariant: tuple[QuotientSpace, ...] = field(default=())

    @classmethod
    def for_tat(cls, t: TatCandidate) -> "SwitchProblem":
        return cls(t.p, t.n, t.f, t.k, (t.k,))


_ROW_BUDGET = 1 << 22


def _solve_partition(problem: SwitchProblem, partition, cap: int, stop_after: int | None):
    p, n, f = problem.p, problem.n, problem.f
    last = n - 1
    free = list(problem.modulus.free_coords)
    proj = problem.modulus.projection[:, free]
    ps = pairs(n)
    known = [q for q, (_, b) in enumerate(ps) if b < last]
    tail = [q for q, (_, b) in enumerate(ps) if b == last]
    known_pairs = [ps[q] for q in known]
    ka = np.array([a for a, _ in known_pairs], dtype=np.int64)
    kb = np.array([b for _, b in known_pairs], dtype=np.int64)
    tensor_flat = wedge_tensor(n).reshape(n, -1)
    f_tail = f[:, tail]
    vecs = gf.all_vectors(n, p).astype(np.float32)
    q = p**n
    # the alpha f term of the last row is linear in the last row of alpha
    e_last = np.zeros((n, n, wedge_dim(n)), dtype=np.int64)
    e_last[:, last, :] = f
    e_last = (e_last @ proj) % p
    checks = [k for k in problem.invariant if 0 < k.dim_k < k.ambient_dim]

    count, found = 0, []
    width = max(1, len(free))
    chunk = max(1, _ROW_BUDGET // (q * width))
    prefixes = gf.independent_prefixes(n, p, last, partition, chunk=chunk) if n > 1 else iter(())
    for pre in prefixes:
        b = len(pre)
        # constant part of the residual alpha f - f alpha^, shape (b, n, C)
        known_wedges = batch_wedge(pre[:, ka], pre[:, kb], p)
        c0 = np.zeros((b, n, wedge_dim(n)), dtype=np.int64)
        c0[:, :last] = pre @ f
        c0 -= np.einsum("iq,bqc->bic", f[:, known], known_wedges)
        c0 = (c0 @ proj) % p
        ops = (pre @ tensor_flat).reshape(b, last, n, -1) @ proj
        lin = -np.matmul(f_tail, ops.reshape(b, last, -1)).reshape(b, n, n, -1).transpose(0, 2, 1, 3)
        lin = (lin + e_last[None]) % p
        # every candidate last row at once on the equations of row 0, then
        # the remaining rows on the survivors only
        lin0 = np.ascontiguousarray(lin[:, :, 0, :].transpose(1, 0, 2)).reshape(n, -1)
        res = (vecs @ lin0.astype(np.float32)).reshape(q, b, width)
        res += c0[None, :, 0, :].astype(np.float32)
        # entries are exact small integers; v = 0 mod p iff rint(v / p) * p == v
        quo = res * np.float32(1.0 / p)
        np.rint(quo, out=quo)
        quo *= p
        xs, bs = np.nonzero((quo == res).all(axis=2))
        del quo
        del res
        if len(xs):
            rest = c0[bs, 1:, :] + np.einsum("sl,slic->sic", gf.all_vectors(n, p)[xs], lin[bs, :, 1:, :])
            keep = ~(rest % p).reshape(len(xs), -1).any(axis=1)
            xs, bs = xs[keep], bs[keep]
        if not len(xs):
            continue
        # invertibility: the last row must avoid the span of the prefix
        parent, code = gf._extensions(pre, p)
        allowed = np.zeros((b, q), dtype=bool)
        allowed[parent, code] = True
        keep = allowed[bs, xs]
        xs, bs = xs[keep], bs[keep]
        order = np.lexsort((xs, bs))
        xs, bs = xs[order], bs[order]
        if checks and len(xs):
            keep = np.ones(len(xs), dtype=bool)
            for lo in range(0, len(xs), 1 << 16):
                sl = slice(lo, lo + (1 << 16))
                alphas = np.concatenate([pre[bs[sl]], gf.all_vectors(n, p)[xs[sl]][:, None, :]], axis=1)
                hats = induced_map(alphas, p)
                for k in checks:
                    img = np.einsum("kc,bcd->bkd", k.basis, hats) @ k.projection % p
                    keep[sl] &= ~img.reshape(len(alphas), -1).any(axis=1)
            xs, bs = xs[keep], bs[keep]
        if len(found) < cap:
            take = min(cap - len(found), len(xs))
            alphas = np.concatenate(
                [pre[bs[:take]], gf.all_vectors(n, p)[xs[:take]][:, None, :]], axis=1
            )
            found.extend(alphas)
        count += len(xs)
        if stop_after is not None and count >= stop_after:
            return count, found, False
    return count, found, True


def solve_switch(
    problem: SwitchProblem,
    workers: int = 1,
    cap: int = 64,
    stop_after: int | None = None,
    budget: int | None = None,
) -> CentralizerReport:
    """Exhaustive search of GL(n, p) for solutions of a switch problem."""
    size = gf.gl_order(problem.n, problem.p)
    budget = search_budget() if budget is None else budget
    if size > budget:
        raise SearchSpaceTooLarge(f"|GL({problem.n},{problem.p})| = {size} exceeds budget {budget}")
    if problem.n < 2:
        raise ValueError("centralizer search needs n >= 2")
    start = time.perf_counter()
    workers = max(1, int(workers))
    parts = [(i, workers) for i in range(1, workers + 1)]
    if workers == 1:
        results = [_solve_partition(problem, parts[0], cap, stop_after)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_solve_partition, problem, part, cap, stop_after) for part in parts]
            results = [fut.result() for fut in futures]
    count = sum(r[0] for r in results)
    complete = all(r[2] for r in results)
    elements = [a for r in results for a in r[1]]
    elements.sort(key=lambda a: tuple(a.reshape(-1)))
    elapsed = time.perf_counter() - start
    log.debug("switch search n=%d p=%d: count=%d in %.2fs", problem.n, problem.p, count, elapsed)
    return CentralizerReport(count, elements[:cap], size, elapsed, complete, workers)


def centralizer(
    t: TatCandidate,
    workers: int = 1,
    cap: int = 64,
    stop_after: int | None = None,
    budget: int | None = None,
    check: bool = True,
) -> CentralizerReport:
    """All ``alpha`` in GL(V) that fix K and commute with f.

    ``check=False`` skips the injectivity/wedge preconditions (used to test
    degenerate maps such as f = 0).
    """
    if check:
        if not verify_injective(t):
            raise InvalidTat("f is not injective")
        if not check_wedge_condition(t.k):
            raise InvalidTat("K violates the wedge condition")
    return solve_switch(SwitchProblem.for_tat(t), workers, cap, stop_after, budget)


@dataclass
class TatVerdict:
    dimension: bool
    wedge_condition: bool
    injective: bool
    trivial_centralizer: bool | None
    centralizer: CentralizerReport | None = None

    @property
    def ok(self) -> bool:
        return bool(self.dimension and self.wedge_condition and self.injective and self.trivial_centralizer)


def check_tat(t: TatCandidate, workers: int = 1, budget: int | None = None, full: bool = False) -> TatVerdict:
    """Evaluate the four TAT conditions; condition (4) only when (1)-(3) hold."""
    dim_ok = t.n >= 4
    wedge_ok = check_wedge_condition(t.k)
    inj_ok = verify_injective(t)
    if not (dim_ok and wedge_ok and inj_ok):
        return TatVerdict(dim_ok, wedge_ok, inj_ok, None)
    rep = centralizer(t, workers=workers, stop_after=None if full else 2, budget=budget)
    return TatVerdict(dim_ok, wedge_ok, inj_ok, rep.complete and rep.count == 1, rep)


def is_tat(t: TatCandidate, workers: int = 1, budget: int | None = None) -> bool:
    return check_tat(t, workers, budget).ok


def transport_tat(t: TatCandidate, beta) -> TatCandidate:
    """The same triple written in the basis given by the rows of ``beta``."""
    beta = gf.fp(beta, t.p)
    beta_inv = gf.mat_inverse(beta, t.p)
    k2 = transform_subspace(t.k, beta)
    f2 = beta_inv @ t.f @ induced_map(beta, t.p) % t.p
    return TatCandidate(t.p, t.n, k2, f2)


# --- random search -------------------------------------------------------------


@dataclass
class SearchStats:
    attempts: int = 0
    rejected_k: int = 0
    rejected_f: int = 0
    nontrivial: int = 0
    elapsed: float = 0.0

    @property
    def tested(self) -> int:
        return self.attempts - self.rejected_f

    def to_json(self) -> dict:
        return {
            "attempts": self.attempts,
            "rejected_k": self.rejected_k,
            "rejected_f": self.rejected_f,
            "nontrivial_centralizer": self.nontrivial,
            "elapsed": round(self.elapsed, 3),
        }


def random_k(p: int, n: int, k_dim: int, rng: np.random.Generator, tries: int = 1000) -> QuotientSpace | None:
    c = wedge_dim(n)
    for _ in range(tries):
        k = QuotientSpace.of(n, p, rng.integers(0, p, size=(k_dim, c)))
        if k.dim_k == k_dim and check_wedge_condition(k):
            return k
    return None


def search_tat(
    p: int,
    n: int,
    k_dim: int = 0,
    seed: int = 0,
    budget: int = 500,
    workers: int = 1,
    stats: SearchStats | None = None,
    gl_budget: int | None = None,
) -> TatCandidate | None:
    """Draw random (K, f) pairs until one has trivial centralizer.

    ``budget`` bounds the number of f candidates drawn.  Deterministic in
    ``seed``.  Returns None when the budget is exhausted.
    """
    p = gf.check_prime(p)
    if n < 4:
        raise ValueError("a TAT needs n >= 4")
    if wedge_dim(n) - k_dim < n or k_dim < 0:
        raise ValueError(f"k_dim={k_dim} leaves no room for an injective f (need C(n,2) - k_dim >= n)")
    stats = SearchStats() if stats is None else stats
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    try:
        for _ in range(budget):
            stats.attempts += 1
            k = random_k(p, n, k_dim, rng)
            if k is None:
                stats.rejected_k += 1
                continue
            t = TatCandidate(p, n, k, rng.integers(0, p, size=(n, wedge_dim(n))))
            if not verify_injective(t):
                stats.rejected_f += 1
                continue
            rep = centralizer(t, workers=workers, stop_after=2, budget=gl_budget)
            if rep.complete and rep.count == 1:
                return t
            stats.nontrivial += 1
        return None
    finally:
        stats.elapsed += time.perf_counter() - start
