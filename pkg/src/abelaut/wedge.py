"""The exterior square of V = GF(p)^n and quotients of it.

Coordinates of a vector in the exterior square are indexed by the pairs
``(i, j)`` with ``i < j`` in lexicographic order (0-based storage; the
generator names x1..xn are 1-based).  This order is also the on-disk order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np

from . import gf


@lru_cache(maxsize=None)
def pairs(n: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, j) for i in range(n) for j in range(i + 1, n))


@lru_cache(maxsize=None)
def pair_index(n: int) -> dict[tuple[int, int], int]:
    return {ij: k for k, ij in enumerate(pairs(n))}


def wedge_dim(n: int) -> int:
    return comb(n, 2)


@lru_cache(maxsize=None)
def _pair_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    ps = pairs(n)
    first = np.array([i for i, _ in ps], dtype=np.int64)
    second = np.array([j for _, j in ps], dtype=np.int64)
    return first, second


def wedge(u, v, p: int) -> np.ndarray:
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    a, b = _pair_arrays(len(u))
    return (u[a] * v[b] - u[b] * v[a]) % p


def batch_wedge(u: np.ndarray, v: np.ndarray, p: int) -> np.ndarray:
    """Wedge along the last axis of two broadcastable arrays."""
    a, b = _pair_arrays(u.shape[-1])
    return (u[..., a] * v[..., b] - u[..., b] * v[..., a]) % p


@lru_cache(maxsize=None)
def wedge_tensor(n: int) -> np.ndarray:
    """``T[a, l, c]`` with ``wedge(u, x)[c] = sum_{a,l} u[a] x[l] T[a, l, c]``."""
    a, b = _pair_arrays(n)
    t = np.zeros((n, n, len(a)), dtype=np.int64)
    c = np.arange(len(a))
    t[a, b, c] = 1
    t[b, a, c] = -1
    t.setflags(write=False)
    return t


def wedge_operator(u, p: int) -> np.ndarray:
    """Matrix of ``x -> u ^ x``, shape ``(n, C(n,2))``."""
    u = np.asarray(u, dtype=np.int64)
    return np.einsum("a,alc->lc", u, wedge_tensor(len(u))) % p


def induced_map(alpha, p: int) -> np.ndarray:
    """Matrix of the map induced on the exterior square: row ``(i, j)`` is
    ``alpha_i ^ alpha_j``.  Works on stacks ``(..., n, n)`` too."""
    alpha = np.asarray(alpha, dtype=np.int64)
    a, b = _pair_arrays(alpha.shape[-1])
    return batch_wedge(alpha[..., a, :], alpha[..., b, :], p)


@dataclass(frozen=True, eq=False)
class QuotientSpace:
    """The quotient of the exterior square of GF(p)^n by a subspace K.

    ``basis`` is the RREF basis of K.  Coset representatives are obtained by
    clearing K's pivot coordinates, which is a linear idempotent section.
    """

    n: int
    p: int
    basis: np.ndarray
    pivots: tuple[int, ...] = field(repr=False)
    projection: np.ndarray = field(repr=False)

    @classmethod
    def of(cls, n: int, p: int, spanning=()) -> "QuotientSpace":
        c = wedge_dim(n)
        spanning = np.asarray(spanning, dtype=np.int64).reshape(-1, c)
        if len(spanning):
            r, pivots, k = gf.rref(spanning, p)
            basis = r[:k]
        else:
            basis, pivots = np.zeros((0, c), dtype=np.int64), []
        proj = np.eye(c, dtype=np.int64)
        for row, pc in zip(basis, pivots):
            proj[pc] = (proj[pc] - row) % p
        basis.setflags(write=False)
        proj.setflags(write=False)
        return cls(n, p, basis, tuple(pivots), proj)

    @classmethod
    def zero(cls, n: int, p: int) -> "QuotientSpace":
        return cls.of(n, p)

    @property
    def ambient_dim(self) -> int:
        return wedge_dim(self.n)

    @property
    def dim_k(self) -> int:
        return len(self.basis)

    @property
    def dim(self) -> int:
        """Dimension of the quotient."""
        return self.ambient_dim - self.dim_k

    @property
    def free_coords(self) -> tuple[int, ...]:
        return tuple(c for c in range(self.ambient_dim) if c not in self.pivots)

    def project(self, v) -> np.ndarray:
        return (np.asarray(v, dtype=np.int64) @ self.projection) % self.p

    def contains(self, v) -> bool:
        return not self.project(v).any()

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuotientSpace):
            return NotImplemented
        return (self.n, self.p) == (other.n, other.p) and np.array_equal(self.basis, other.basis)

    def __hash__(self) -> int:
        return hash((self.n, self.p, self.basis.tobytes()))


def projective_points(n: int, p: int) -> np.ndarray:
    """One representative (first nonzero entry 1) per line of GF(p)^n."""
    vecs = gf.all_vectors(n, p)[1:]
    lead = vecs[np.arange(len(vecs)), np.argmax(vecs != 0, axis=1)]
    return vecs[lead == 1]


def check_wedge_condition(k: QuotientSpace) -> bool:
    """True iff ``v ^ V`` is not contained in K for every nonzero v."""
    pts = projective_points(k.n, k.p)
    ops = np.einsum("ba,alc->blc", pts, wedge_tensor(k.n)) @ k.projection % k.p
    return bool(ops.reshape(len(pts), -1).any(axis=1).all())


def wedge_condition_witness(k: QuotientSpace) -> np.ndarray | None:
    """A nonzero v with ``v ^ V`` inside K, or None."""
    pts = projective_points(k.n, k.p)
    ops = np.einsum("ba,alc->blc", pts, wedge_tensor(k.n)) @ k.projection % k.p
    bad = ~ops.reshape(len(pts), -1).any(axis=1)
    return pts[np.argmax(bad)] if bad.any() else None


def transform_subspace(k: QuotientSpace, alpha) -> QuotientSpace:
    """The image of K under the map induced by ``alpha``."""
    return QuotientSpace.of(k.n, k.p, k.basis @ induced_map(alpha, k.p))


def subspace_invariant(k: QuotientSpace, alpha) -> bool:
    if k.dim_k == 0:
        return True
    image = k.basis @ induced_map(alpha, k.p) @ k.projection % k.p
    return not image.any() and gf.rank(k.basis @ induced_map(alpha, k.p), k.p) == k.dim_k
