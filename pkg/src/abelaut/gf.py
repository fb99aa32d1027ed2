"""Dense linear algebra over a prime field GF(p), p odd.

Matrices and vectors are plain ``numpy`` int64 arrays with entries reduced
into ``[0, p)``.  Vectors are rows and maps act on the right, so the image
of ``v`` under ``m`` is ``v @ m``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

MAX_PRIME = 251


class SingularMatrix(ValueError):
    pass


def check_prime(p: int) -> int:
    """Validate the field characteristic and return it as an int."""
    p = int(p)
    if not 3 <= p <= MAX_PRIME or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
        raise ValueError(f"p must be an odd prime in [3, {MAX_PRIME}], got {p}")
    return p


def fp(a, p: int) -> np.ndarray:
    """Coerce to an int64 array reduced mod p."""
    return np.asarray(a, dtype=np.int64) % p


def inv_mod(a: int, p: int) -> int:
    a = int(a) % p
    if a == 0:
        raise ZeroDivisionError("0 has no inverse mod p")
    return pow(a, -1, p)


def rref(m, p: int) -> tuple[np.ndarray, list[int], int]:
    """Reduced row echelon form of ``m``.

    Returns ``(R, pivots, rank)``; ``R`` has the same shape as ``m`` with the
    zero rows at the bottom.
    """
    r = fp(m, p).copy()
    if r.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    rows, cols = r.shape
    pivots: list[int] = []
    row = 0
    for col in range(cols):
        if row == rows:
            break
        nz = np.nonzero(r[row:, col])[0]
        if nz.size == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            r[[row, piv]] = r[[piv, row]]
        r[row] = (r[row] * inv_mod(r[row, col], p)) % p
        factors = r[:, col].copy()
        factors[row] = 0
        if factors.any():
            r = (r - np.outer(factors, r[row])) % p
        pivots.append(col)
        row += 1
    return r, pivots, len(pivots)


def rank(m, p: int) -> int:
    m = np.asarray(m)
    if m.size == 0:
        return 0
    return rref(m, p)[2]


def as_rows(a, ncols: int) -> np.ndarray:
    """``a`` as an int64 matrix with ``ncols`` columns; empty input gives 0 rows."""
    a = np.asarray(a, dtype=np.int64)
    return a.reshape(a.size // ncols if ncols else 0, ncols)


def row_basis(m, p: int, ncols: int | None = None) -> np.ndarray:
    """Canonical (RREF) basis of the row space, shape ``(rank, ncols)``."""
    m = np.asarray(m, dtype=np.int64)
    if m.size == 0:
        if ncols is None:
            ncols = m.shape[1] if m.ndim == 2 else 0
        return np.zeros((0, ncols), dtype=np.int64)
    r, _, k = rref(m.reshape(-1, m.shape[-1]), p)
    return r[:k]


def same_row_space(a, b, p: int) -> bool:
    ba, bb = row_basis(a, p), row_basis(b, p)
    return ba.shape == bb.shape and bool(np.array_equal(ba, bb))


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def mat_inverse(m, p: int) -> np.ndarray:
    m = fp(m, p)
    n = m.shape[0]
    if m.ndim != 2 or m.shape[1] != n:
        raise ValueError("mat_inverse expects a square matrix")
    r, _, k = rref(np.hstack([m, identity(n)]), p)
    if k < n or not np.array_equal(r[:, :n], identity(n)):
        raise SingularMatrix(f"matrix has rank < {n}")
    return r[:, n:]


def is_invertible(m, p: int) -> bool:
    m = np.asarray(m)
    return m.shape[0] == m.shape[1] and rank(m, p) == m.shape[0]


def nullspace(a, p: int) -> np.ndarray:
    """Basis (as rows) of ``{x : a @ x = 0}``."""
    a = fp(a, p)
    ncols = a.shape[1]
    r, pivots, _ = rref(a, p)
    free = [c for c in range(ncols) if c not in pivots]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for k, c in enumerate(free):
        basis[k, c] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = (-r[i, c]) % p
    return basis


@dataclass(frozen=True)
class SolutionSet:
    """Affine solution set ``particular + span(nullspace)``."""

    particular: np.ndarray
    nullspace: np.ndarray

    @property
    def dimension(self) -> int:
        return len(self.nullspace)


def solve_linear(a, b, p: int) -> SolutionSet | None:
    """Solve ``a @ x = b``; ``None`` when the system is inconsistent."""
    a = fp(a, p)
    b = fp(b, p).reshape(-1)
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"dimension mismatch: a has {a.shape[0]} rows, b has {b.shape[0]}")
    ncols = a.shape[1]
    r, pivots, _ = rref(np.hstack([a, b[:, None]]), p)
    if ncols in pivots:
        return None
    x = np.zeros(ncols, dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = r[i, ncols]
    return SolutionSet(x, nullspace(a, p))


def solve_left(a, b, p: int) -> SolutionSet | None:
    """Solve ``x @ a = b`` (row-vector convention)."""
    return solve_linear(np.asarray(a).T, b, p)


# --- enumeration of GL(n, p) -------------------------------------------------


def gl_order(n: int, p: int) -> int:
    out = 1
    for i in range(n):
        out *= p**n - p**i
    return out


@lru_cache(maxsize=None)
def all_vectors(n: int, p: int) -> np.ndarray:
    """All of GF(p)^n as rows; row ``c`` is the vector with base-p code ``c``
    (first coordinate most significant)."""
    codes = np.arange(p**n, dtype=np.int64)
    weights = p ** np.arange(n - 1, -1, -1, dtype=np.int64)
    out = (codes[:, None] // weights[None, :]) % p
    out.setflags(write=False)
    return out


def vector_codes(v: np.ndarray, p: int) -> np.ndarray:
    n = v.shape[-1]
    weights = p ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return v @ weights


def _extensions(prefix: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """For a batch of independent row sets ``(B, k, n)``, list every vector
    outside the span of each set.  Returns ``(parent_index, code)`` in
    parent-major, code-ascending order."""
    b, k, n = prefix.shape
    coeffs = all_vectors(k, p)
    span = np.einsum("sk,bkn->bsn", coeffs, prefix) % p
    mask = np.ones((b, p**n), dtype=bool)
    mask[np.arange(b)[:, None], vector_codes(span, p)] = False
    return np.nonzero(mask)


def first_rows(n: int, p: int, partition: tuple[int, int] = (1, 1)) -> np.ndarray:
    """Codes of the nonzero first rows assigned to a worker (round robin)."""
    index, count = partition
    if not 1 <= index <= count:
        raise ValueError(f"worker index must lie in [1, {count}], got {index}")
    codes = np.arange(1, p**n, dtype=np.int64)
    return codes[(codes - 1) % count == index - 1]


def independent_prefixes(
    n: int, p: int, depth: int, partition: tuple[int, int] = (1, 1), chunk: int = 1 << 18
) -> Iterator[np.ndarray]:
    """Batches ``(B, depth, n)`` of linearly independent ordered row tuples.

    Taking ``depth = n`` yields GL(n, p).  The order is deterministic and
    depends only on ``(n, p, partition)``; the batch boundaries depend on
    ``chunk`` as well.
    """
    vecs = all_vectors(n, p)
    start = vecs[first_rows(n, p, partition)][:, None, :]

    def expand(batch: np.ndarray) -> Iterator[np.ndarray]:
        k = batch.shape[1]
        if k == depth:
            yield batch
            return
        step = max(1, chunk // p**n)
        for lo in range(0, len(batch), step):
            part = batch[lo : lo + step]
            parent, code = _extensions(part, p)
            child = np.concatenate([part[parent], vecs[code][:, None, :]], axis=1)
            yield from expand(child)

    for lo in range(0, len(start), max(1, chunk // p**n)):
        yield from expand(start[lo : lo + max(1, chunk // p**n)])


def gl_batches(n: int, p: int, partition: tuple[int, int] = (1, 1), chunk: int = 1 << 18) -> Iterator[np.ndarray]:
    """GL(n, p) as a stream of ``(B, n, n)`` arrays."""
    yield from independent_prefixes(n, p, n, partition, chunk)


def gl_enumerate(n: int, p: int, partition: tuple[int, int] = (1, 1)) -> Iterator[np.ndarray]:
    """Stream the invertible n x n matrices owned by worker ``partition``.

    ``partition = (index, count)`` with ``1 <= index <= count``; the union over
    all indices is GL(n, p) without repetition.
    """
    for batch in gl_batches(n, p, partition):
        batch.setflags(write=False)
        yield from batch


def to_json(m) -> list:
    return np.asarray(m, dtype=np.int64).tolist()
