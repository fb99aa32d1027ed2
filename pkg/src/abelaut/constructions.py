"""The four group families built from a TAT (V, K, f).

Generators are named x1..xn (and z, y for the two enlarged families).  The
central tail W is the quotient of the exterior square by K, written in the
coordinates of the canonical coset representatives.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gf
from .group import PcPresentation
from .tat import InvalidTat, TatCandidate, check_tat
from .wedge import pairs, wedge_dim, wedge_operator

SPECIAL = "special"
ZUREK = "zurek"
CENTRAL_PRODUCT = "central_product"
EXTENSION = "extension"
TAGS = (SPECIAL, ZUREK, CENTRAL_PRODUCT, EXTENSION)


class AmalgamObstruction(ValueError):
    pass


class BadGamma(ValueError):
    pass


def _require_tat(t: TatCandidate, check: bool, workers: int) -> None:
    if not check:
        return
    verdict = check_tat(t, workers=workers)
    if not verdict.ok:
        raise InvalidTat(f"not a TAT: {verdict}")


def tail_coords(t: TatCandidate) -> list[int]:
    return list(t.k.free_coords)


def wedge_tails(t: TatCandidate) -> dict[tuple[int, int], np.ndarray]:
    """``[x_i, x_j]`` as a vector of W for every ``i < j``."""
    free = tail_coords(t)
    eye = np.eye(wedge_dim(t.n), dtype=np.int64)
    return {ij: t.k.project(eye[q])[free] for q, ij in enumerate(pairs(t.n))}


def _basic(t: TatCandidate, height: int, construction: str) -> PcPresentation:
    free = tail_coords(t)
    names = [f"x{i + 1}" for i in range(t.n)]
    return PcPresentation.from_tables(
        t.p, names, [height] * t.n, t.f[:, free], wedge_tails(t), len(free),
        construction=construction, meta={"tat": t},
    )


def build_special(t: TatCandidate, check: bool = True, workers: int = 1) -> PcPresentation:
    """``<x : x^p = x f, K>``."""
    _require_tat(t, check, workers)
    return _basic(t, 1, SPECIAL)


def build_zurek(t: TatCandidate, check: bool = True, workers: int = 1) -> PcPresentation:
    """``<x : x^(p^2) = x f, K>``."""
    _require_tat(t, check, workers)
    return _basic(t, 2, ZUREK)


def first_outside(basis: np.ndarray, dim: int, p: int) -> np.ndarray | None:
    """Lexicographically first vector of GF(p)^dim outside ``span(basis)``."""
    r = gf.rank(basis, p) if len(basis) else 0
    if r == dim:
        return None
    for code in range(1, p**dim):
        v = np.array([(code // p**k) % p for k in range(dim - 1, -1, -1)], dtype=np.int64)
        if r == 0 or gf.rank(np.vstack([basis, v]), p) > r:
            return v
    return None


def build_central_product(t: TatCandidate, check: bool = True, workers: int = 1) -> PcPresentation:
    """The central product of ``<x : x^p = x f, K>`` with ``<z>`` of order p^2,
    amalgamating ``z^p`` with an element of H' outside H^p."""
    _require_tat(t, check, workers)
    free = tail_coords(t)
    image = t.f[:, free]
    c0 = first_outside(image, len(free), t.p)
    if c0 is None:
        raise AmalgamObstruction("K + Vf is the whole exterior square")
    names = [f"x{i + 1}" for i in range(t.n)] + ["z"]
    tails = np.vstack([image, c0])
    return PcPresentation.from_tables(
        t.p, names, [1] * (t.n + 1), tails, wedge_tails(t), len(free),
        construction=CENTRAL_PRODUCT, meta={"tat": t, "c0": c0},
    )


def is_inner_shaped(gamma, p: int) -> bool:
    """True iff ``gamma`` is ``x -> x ^ v`` for some v."""
    gamma = gf.fp(gamma, p)
    n = gamma.shape[0]
    # gamma = wedge_operator(v) is linear in v: column (v_a) of the system
    cols = np.stack([wedge_operator(np.eye(n, dtype=np.int64)[a], p).reshape(-1) for a in range(n)], axis=1)
    return gf.solve_linear(cols, gamma.reshape(-1), p) is not None


def build_extension(
    t: TatCandidate, m: int = 2, gamma=None, check: bool = True, workers: int = 1
) -> PcPresentation:
    """Extend H = ``<x : x^p = x f>`` by y with ``[x, y] = x gamma`` and
    ``y^(p^m)`` in H' outside H^p.  The default gamma is f itself."""
    if m <= 1:
        raise ValueError("the extension needs m > 1")
    if t.k.dim_k:
        raise InvalidTat("the extension needs K = 0")
    gamma = t.f if gamma is None else gf.fp(gamma, t.p)
    if gamma.shape != (t.n, wedge_dim(t.n)):
        raise BadGamma(f"gamma must have shape ({t.n}, {wedge_dim(t.n)})")
    if gf.rank(gamma, t.p) < t.n:
        raise BadGamma("gamma is not injective")
    if is_inner_shaped(gamma, t.p):
        raise BadGamma("gamma is inner (x -> x ^ v)")
    _require_tat(t, check, workers)
    c = wedge_dim(t.n)
    c0 = first_outside(t.f, c, t.p)
    names = ["y"] + [f"x{i + 1}" for i in range(t.n)]
    comm = {(i + 1, j + 1): w for (i, j), w in wedge_tails(t).items()}
    for i in range(t.n):
        comm[(0, i + 1)] = (-gamma[i]) % t.p  # [y, x_i] = [x_i, y]^-1
    tails = np.vstack([c0, t.f])
    return PcPresentation.from_tables(
        t.p, names, [m] + [1] * t.n, tails, comm, c,
        construction=EXTENSION, meta={"tat": t, "c0": c0, "gamma": gamma, "m": m},
    )


def build(tag: str, t: TatCandidate, m: int = 2, gamma=None, check: bool = True, workers: int = 1) -> PcPresentation:
    if tag == SPECIAL:
        return build_special(t, check, workers)
    if tag == ZUREK:
        return build_zurek(t, check, workers)
    if tag == CENTRAL_PRODUCT:
        return build_central_product(t, check, workers)
    if tag == EXTENSION:
        return build_extension(t, m, gamma, check, workers)
    raise ValueError(f"unknown construction {tag!r}")


@dataclass(frozen=True)
class ClaimSheet:
    aut_equals_autc: bool
    aut_structure: str
    lattice: str
    purely_nonabelian_certificate: bool | None = None

    def to_json(self) -> dict:
        return {
            "aut_equals_autc": self.aut_equals_autc,
            "aut_structure": self.aut_structure,
            "lattice": self.lattice,
            "purely_nonabelian_certificate": self.purely_nonabelian_certificate,
        }


_CLAIMS = {
    SPECIAL: ClaimSheet(True, "elementary_abelian", "G'=Phi=Z"),
    ZUREK: ClaimSheet(True, "nonabelian", "G'<Phi=Z", True),
    CENTRAL_PRODUCT: ClaimSheet(True, "elementary_abelian", "G'=Phi<Z"),
    EXTENSION: ClaimSheet(True, "abelian", "G'<Phi=Z"),
}


def claim_sheet(tag: str) -> ClaimSheet:
    return _CLAIMS[tag]
