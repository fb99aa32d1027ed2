"""Arithmetic in p-groups of class at most 2 with an elementary abelian
central tail.

A presentation has generators ``g_1..g_r``; generator ``g_i`` has stored
order ``p**e_i`` modulo the tail and ``g_i**(p**e_i) = w_i`` for a power tail
``w_i`` in ``W = GF(p)^d``.  Commutators ``[g_i, g_j] = w_ij`` lie in W, and W
is central of exponent p.  Elements have the normal form
``g_1**a_1 ... g_r**a_r * c`` with ``0 <= a_i < p**e_i`` and ``c`` in W.

Commutators are ``[g, h] = g^-1 h^-1 g h``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Sequence

import numpy as np

from . import gf


@dataclass(frozen=True)
class GroupElement:
    a: tuple[int, ...]
    c: tuple[int, ...]

    def to_json(self) -> dict:
        return {"exponents": list(self.a), "tail": list(self.c)}

    @classmethod
    def from_json(cls, data: dict) -> "GroupElement":
        return cls(tuple(int(x) for x in data["exponents"]), tuple(int(x) for x in data["tail"]))


@dataclass(frozen=True, eq=False)
class PcPresentation:
    p: int
    names: tuple[str, ...]
    e: tuple[int, ...]
    power_tails: np.ndarray  # (r, d)
    comm: np.ndarray  # (r, r, d), antisymmetric
    construction: str | None = None
    meta: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        r = len(self.names)
        comm = np.asarray(self.comm, dtype=np.int64) % self.p
        d = comm.shape[-1] if comm.ndim == 3 else 0
        tails = np.asarray(self.power_tails, dtype=np.int64).reshape(r, d) % self.p
        if len(self.e) != r or any(x < 1 for x in self.e):
            raise ValueError("every generator needs an exponent height e >= 1")
        if comm.shape != (r, r, d):
            raise ValueError(f"commutator table must have shape {(r, r, d)}, got {comm.shape}")
        if np.any((comm + comm.transpose(1, 0, 2)) % self.p) or np.any(comm[np.arange(r), np.arange(r)]):
            raise ValueError("commutator table must be alternating")
        tails.setflags(write=False)
        comm.setflags(write=False)
        object.__setattr__(self, "power_tails", tails)
        object.__setattr__(self, "comm", comm)
        object.__setattr__(self, "_mods", tuple(self.p**x for x in self.e))
        object.__setattr__(
            self,
            "_pairs",
            tuple(
                (i, j, tuple(int(x) for x in comm[i, j]))
                for i in range(r)
                for j in range(i + 1, r)
                if comm[i, j].any()
            ),
        )
        object.__setattr__(self, "_ptails", tuple(tuple(int(x) for x in row) for row in tails))

    @classmethod
    def from_tables(cls, p, names, e, power_tails, comm_upper: dict, d: int, **kw) -> "PcPresentation":
        """Build from ``{(i, j): w_ij}`` for ``i < j``."""
        r = len(names)
        comm = np.zeros((r, r, d), dtype=np.int64)
        for (i, j), w in comm_upper.items():
            comm[i, j] = w
            comm[j, i] = -np.asarray(w)
        return cls(p, tuple(names), tuple(e), np.asarray(power_tails).reshape(r, d), comm, **kw)

    @property
    def rank(self) -> int:
        return len(self.names)

    @property
    def d(self) -> int:
        return self.power_tails.shape[1]

    @property
    def log_order(self) -> int:
        return sum(self.e) + self.d

    @property
    def order(self) -> int:
        return self.p**self.log_order

    def identity(self) -> GroupElement:
        return GroupElement((0,) * self.rank, (0,) * self.d)

    def gen(self, i: int | str) -> GroupElement:
        if isinstance(i, str):
            i = self.names.index(i)
        a = [0] * self.rank
        a[i] = 1
        return GroupElement(tuple(a), (0,) * self.d)

    def central(self, c) -> GroupElement:
        return GroupElement((0,) * self.rank, tuple(int(x) % self.p for x in c))

    def element(self, a, c=None) -> GroupElement:
        """Normal form of ``prod g_i**a_i * c`` for arbitrary integer ``a``."""
        g = self.identity()
        for i, k in enumerate(a):
            if k:
                g = self.multiply(g, self.power(self.gen(i), int(k)))
        if c is not None:
            g = self.multiply(g, self.central(c))
        return g

    def random_element(self, rng: np.random.Generator) -> GroupElement:
        a = tuple(int(rng.integers(0, m)) for m in self._mods)
        c = tuple(int(x) for x in rng.integers(0, self.p, size=self.d))
        return GroupElement(a, c)

    def check(self, g: GroupElement) -> None:
        if len(g.a) != self.rank or len(g.c) != self.d:
            raise ValueError(f"element of shape ({len(g.a)}, {len(g.c)}) does not fit ({self.rank}, {self.d})")

    # --- arithmetic ---------------------------------------------------------

    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        self.check(g)
        self.check(h)
        p = self.p
        tail = [x + y for x, y in zip(g.c, h.c)]
        a = []
        for i, (x, y, m) in enumerate(zip(g.a, h.a, self._mods)):
            s = x + y
            if s >= m:
                s -= m
                for k, w in enumerate(self._ptails[i]):
                    tail[k] += w
            a.append(s)
        # moving h's letters left past g's: g_j^x g_i^y = g_i^y g_j^x [g_j, g_i]^(xy)
        ga, ha = g.a, h.a
        for i, j, w in self._pairs:
            coef = ga[j] * ha[i]
            if coef:
                for k, x in enumerate(w):
                    tail[k] -= coef * x
        return GroupElement(tuple(a), tuple(x % p for x in tail))

    def inverse(self, g: GroupElement) -> GroupElement:
        neg = GroupElement(tuple((-x) % m for x, m in zip(g.a, self._mods)), (0,) * self.d)
        t = self.multiply(g, neg).c
        return GroupElement(neg.a, tuple((-x) % self.p for x in t))

    def power(self, g: GroupElement, k: int) -> GroupElement:
        if k < 0:
            g, k = self.inverse(g), -k
        out = self.identity()
        while k:
            if k & 1:
                out = self.multiply(out, g)
            k >>= 1
            if k:
                g = self.multiply(g, g)
        return out

    def commutator(self, g: GroupElement, h: GroupElement) -> GroupElement:
        tail = [0] * self.d
        for i, j, w in self._pairs:
            coef = g.a[i] * h.a[j] - g.a[j] * h.a[i]
            if coef:
                for k, x in enumerate(w):
                    tail[k] += coef * x
        return GroupElement((0,) * self.rank, tuple(x % self.p for x in tail))

    def element_order(self, g: GroupElement) -> int:
        order, ident = 1, self.identity()
        while g != ident:
            g = self.power(g, self.p)
            order *= self.p
        return order

    def is_central(self, g: GroupElement) -> bool:
        ident = self.identity()
        return all(self.commutator(g, self.gen(i)) == ident for i in range(self.rank))

    # --- characteristic subgroups ---------------------------------------------

    def commutator_span(self) -> np.ndarray:
        r = self.rank
        rows = [self.comm[i, j] for i in range(r) for j in range(i + 1, r)]
        return gf.row_basis(np.array(rows, dtype=np.int64).reshape(len(rows), self.d), self.p, self.d)

    def power_span(self) -> np.ndarray:
        return gf.row_basis(self.power_tails, self.p, self.d)

    def radical(self) -> np.ndarray:
        """Vectors u in GF(p)^r with ``sum_i u_i w_ij = 0`` for every j."""
        m = self.comm.reshape(self.rank, self.rank * self.d)
        return gf.nullspace(m.T, self.p) if m.size else np.eye(self.rank, dtype=np.int64)

    def derived_subgroup(self) -> "StandardSubgroup":
        return StandardSubgroup.make(self, self.e, [], self.commutator_span())

    def center(self) -> "StandardSubgroup":
        return StandardSubgroup.make(self, (0,) * self.rank, self.radical(), np.eye(self.d, dtype=np.int64))

    def agemo(self) -> "StandardSubgroup":
        d = tuple(min(1, x) for x in self.e)
        return StandardSubgroup.make(self, d, _free_digits(self.e, d), self.power_span())

    def frattini(self) -> "StandardSubgroup":
        d = tuple(min(1, x) for x in self.e)
        tails = np.vstack([self.power_span(), self.commutator_span()])
        return StandardSubgroup.make(self, d, _free_digits(self.e, d), tails)

    def omega(self, k: int) -> "StandardSubgroup":
        """Elements of order dividing ``p**k``.

        For ``k >= 1`` the ``p**k``-th power of ``prod g_i**a_i * c`` is the
        central element ``sum_i (a_i / p**(e_i - k)) w_i`` when every
        ``p**(e_i - k)`` divides ``a_i`` (only generators with ``e_i >= k``
        contribute), so this is a linear condition on one digit per generator.
        """
        if k < 1:
            raise ValueError("omega needs k >= 1")
        d = tuple(max(0, x - k) for x in self.e)
        r = self.rank
        m = np.zeros((r, self.d), dtype=np.int64)
        for i, x in enumerate(self.e):
            if x >= k:
                m[i] = self.power_tails[i]
        digits = gf.nullspace(m.T, self.p) if self.d else np.eye(r, dtype=np.int64)
        return StandardSubgroup.make(self, d, digits, np.eye(self.d, dtype=np.int64))

    def whole(self) -> "StandardSubgroup":
        return StandardSubgroup.make(self, (0,) * self.rank, np.eye(self.rank, dtype=np.int64), np.eye(self.d, dtype=np.int64))

    def is_special(self) -> bool:
        g1 = self.derived_subgroup()
        return self.agemo() <= g1 and g1 == self.center()

    def is_purely_nonabelian_certificate(self) -> bool:
        """``Z(G) <= Phi(G)``, which rules out nontrivial abelian direct factors."""
        return self.center() <= self.frattini()

    # --- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        out = {
            "schema": 1,
            "p": self.p,
            "generators": [
                {"name": n, "e": e, "power_tail": gf.to_json(t)}
                for n, e, t in zip(self.names, self.e, self.power_tails)
            ],
            "w_dim": self.d,
            "comm_table": [
                {"i": i, "j": j, "tail": list(w)} for i, j, w in self._pairs
            ],
            "construction": self.construction,
        }
        out.update(_meta_to_json(self.meta))
        return out

    @classmethod
    def from_json(cls, data: dict) -> "PcPresentation":
        gens = data["generators"]
        d = int(data["w_dim"])
        comm = {(int(c["i"]), int(c["j"])): c["tail"] for c in data.get("comm_table", [])}
        return cls.from_tables(
            int(data["p"]),
            [g["name"] for g in gens],
            [int(g["e"]) for g in gens],
            np.array([g["power_tail"] for g in gens], dtype=np.int64).reshape(len(gens), d),
            comm,
            d,
            construction=data.get("construction"),
            meta=_meta_from_json(data),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, PcPresentation):
            return NotImplemented
        return (
            (self.p, self.names, self.e, self.construction) == (other.p, other.names, other.e, other.construction)
            and np.array_equal(self.power_tails, other.power_tails)
            and np.array_equal(self.comm, other.comm)
            and _meta_to_json(self.meta) == _meta_to_json(other.meta)
        )

    __hash__ = None


def _meta_to_json(meta: dict) -> dict:
    out = {}
    if "tat" in meta:
        out["tat"] = meta["tat"].to_json()
    params = {k: (gf.to_json(v) if isinstance(v, np.ndarray) else v) for k, v in meta.items() if k != "tat"}
    if params:
        out["params"] = params
    return out


def _meta_from_json(data: dict) -> dict:
    from .tat import TatCandidate

    meta: dict[str, Any] = {}
    if data.get("tat"):
        meta["tat"] = TatCandidate.from_json(data["tat"])
    for k, v in (data.get("params") or {}).items():
        meta[k] = np.asarray(v, dtype=np.int64) if isinstance(v, list) else v
    return meta


def _free_digits(e: Sequence[int], d: Sequence[int]) -> np.ndarray:
    r = len(e)
    return np.eye(r, dtype=np.int64)[[i for i in range(r) if d[i] < e[i]]]


class Relation(str, Enum):
    EQUAL = "equal"
    SUBSET = "proper-subset"
    SUPERSET = "superset"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True, eq=False)
class StandardSubgroup:
    """The set ``{(a, c) : a in L, c in C}``.

    L is described by divisibility exponents ``div`` (``p**div_i`` divides
    ``a_i``) and a subspace ``digits`` of GF(p)^r that the vector of leading
    digits ``(a_i / p**div_i) mod p`` must lie in; higher digits are free.
    The stored form is normalized, so equal sets have equal data.
    """

    pres: PcPresentation
    div: tuple[int, ...]
    digits: np.ndarray
    tails: np.ndarray

    @classmethod
    def make(cls, pres: PcPresentation, div, digits, tails) -> "StandardSubgroup":
        p, r, e = pres.p, pres.rank, pres.e
        div = [min(int(x), y) for x, y in zip(div, e)]
        digits = gf.as_rows(digits, r) % p
        digits[:, [i for i in range(r) if div[i] == e[i]]] = 0
        digits = gf.row_basis(digits, p, r)
        # a coordinate whose leading digit is always 0 has a larger valuation
        while True:
            dead = [i for i in range(r) if div[i] < e[i] and not digits[:, i].any()]
            if not dead:
                break
            for i in dead:
                div[i] += 1
                if div[i] < e[i]:
                    digits = np.vstack([digits, np.eye(r, dtype=np.int64)[i]])
            digits = gf.row_basis(digits, p, r)
        tails = gf.row_basis(gf.as_rows(tails, pres.d), p, pres.d)
        digits.setflags(write=False)
        tails.setflags(write=False)
        return cls(pres, tuple(div), digits, tails)

    @property
    def free(self) -> list[int]:
        return [i for i, (x, y) in enumerate(zip(self.div, self.pres.e)) if x < y]

    @property
    def log_order(self) -> int:
        e = self.pres.e
        higher = sum(e[i] - self.div[i] - 1 for i in self.free)
        return higher + len(self.digits) + len(self.tails)

    @property
    def order(self) -> int:
        return self.pres.p**self.log_order

    def contains(self, g: GroupElement) -> bool:
        p = self.pres.p
        if not _in_span(self.tails, g.c, p):
            return False
        delta = []
        for a, k, e in zip(g.a, self.div, self.pres.e):
            if a % p**k:
                return False
            delta.append((a // p**k) % p if k < e else 0)
        return _in_span(self.digits, delta, p)

    __contains__ = contains

    def _lifted_digits(self, div) -> np.ndarray:
        """Digit space of this subgroup read at the (larger) levels ``div``."""
        r, p = self.pres.rank, self.pres.p
        raised = [i for i in range(r) if div[i] > self.div[i]]
        kept = self.digits
        if raised:
            # solutions with a zero leading digit on every raised coordinate
            sel = np.zeros((r, len(raised)), dtype=np.int64)
            for k, i in enumerate(raised):
                sel[i, k] = 1
            coeffs = gf.nullspace((self.digits @ sel).T % p, p) if len(self.digits) else np.zeros((0, 0), dtype=np.int64)
            kept = coeffs @ self.digits % p if len(coeffs) else np.zeros((0, r), dtype=np.int64)
            extra = np.eye(r, dtype=np.int64)[[i for i in raised if div[i] < self.pres.e[i]]]
            kept = np.vstack([kept, extra])
        return kept

    def __and__(self, other: "StandardSubgroup") -> "StandardSubgroup":
        p, r = self.pres.p, self.pres.rank
        div = tuple(max(x, y) for x, y in zip(self.div, other.div))
        d1, d2 = self._lifted_digits(div), other._lifted_digits(div)
        digits = _intersect(d1, d2, p, r)
        tails = _intersect(self.tails, other.tails, p, self.pres.d)
        return StandardSubgroup.make(self.pres, div, digits, tails)

    def __eq__(self, other) -> bool:
        if not isinstance(other, StandardSubgroup):
            return NotImplemented
        return (
            self.div == other.div
            and np.array_equal(self.digits, other.digits)
            and np.array_equal(self.tails, other.tails)
        )

    __hash__ = None

    def __le__(self, other: "StandardSubgroup") -> bool:
        return (self & other) == self

    def __lt__(self, other: "StandardSubgroup") -> bool:
        return self <= other and self != other

    def generators(self) -> list[GroupElement]:
        """A generating set: one element per digit basis vector, one per
        free higher digit, and one per tail basis vector."""
        pres, p = self.pres, self.pres.p
        out = []
        for row in self.digits:
            a = tuple(int(row[i]) * p ** self.div[i] if self.div[i] < pres.e[i] else 0 for i in range(pres.rank))
            out.append(GroupElement(a, (0,) * pres.d))
        for i in self.free:
            if self.div[i] + 1 < pres.e[i]:
                a = [0] * pres.rank
                a[i] = p ** (self.div[i] + 1)
                out.append(GroupElement(tuple(a), (0,) * pres.d))
        for row in self.tails:
            out.append(pres.central(row))
        return out


def _in_span(basis: np.ndarray, v, p: int) -> bool:
    v = np.asarray(v, dtype=np.int64) % p
    if not v.any():
        return True
    if not len(basis):
        return False
    return gf.rank(np.vstack([basis, v]), p) == len(basis)


def _intersect(a: np.ndarray, b: np.ndarray, p: int, dim: int) -> np.ndarray:
    if not len(a) or not len(b):
        return np.zeros((0, dim), dtype=np.int64)
    # x a = y b  <=>  (x, -y) in the left kernel of [a; b]
    ker = gf.nullspace(np.vstack([a, b]).T, p)
    return gf.row_basis(ker[:, : len(a)] @ a % p, p, dim)


def subgroup_compare(s1: StandardSubgroup, s2: StandardSubgroup) -> Relation:
    le, ge = s1 <= s2, s2 <= s1
    if le and ge:
        return Relation.EQUAL
    if le:
        return Relation.SUBSET
    if ge:
        return Relation.SUPERSET
    return Relation.INCOMPARABLE


def subgroup_order(s: StandardSubgroup) -> int:
    return s.order


def lattice_relation(pres: PcPresentation) -> str:
    """The relation among G', Phi(G) and Z(G), written e.g. ``G'<Phi=Z``."""
    g1, phi, z = pres.derived_subgroup(), pres.frattini(), pres.center()

    def sym(a, b):
        rel = subgroup_compare(a, b)
        return {Relation.EQUAL: "=", Relation.SUBSET: "<", Relation.SUPERSET: ">"}.get(rel, "?")

    return f"G'{sym(g1, phi)}Phi{sym(phi, z)}Z"
