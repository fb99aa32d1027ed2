"""Central automorphisms through Hom(G, Z(G)) and the circle operation.

A hom ``gamma`` from G to Z(G) gives the endomorphism ``g -> g * g^gamma``
(written ``1 + gamma``); composing two of these corresponds to the circle
operation ``gamma o delta = gamma + delta + gamma delta`` where
``gamma delta`` means "apply gamma, then delta".
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import gf
from .constructions import CENTRAL_PRODUCT, EXTENSION, SPECIAL, ZUREK
from .group import GroupElement, PcPresentation, StandardSubgroup
from .tat import CentralizerReport, SwitchProblem, centralizer, solve_switch
from .wedge import QuotientSpace, induced_map, wedge_dim, wedge_operator

log = logging.getLogger(__name__)


class NotBijective(ValueError):
    pass


class Inconclusive(RuntimeError):
    pass


@dataclass(frozen=True)
class CentralHom:
    """A homomorphism G -> Z(G), given by the images of the generators."""

    pres: PcPresentation = field(repr=False, compare=False)
    images: tuple[GroupElement, ...]

    @classmethod
    def zero(cls, pres: PcPresentation) -> "CentralHom":
        return cls(pres, (pres.identity(),) * pres.rank)

    @classmethod
    def from_images(cls, pres: PcPresentation, images: dict) -> "CentralHom":
        """``images`` maps generator names or indices to elements; the rest go to 1."""
        out = [pres.identity()] * pres.rank
        for key, g in images.items():
            out[pres.names.index(key) if isinstance(key, str) else key] = g
        return cls(pres, tuple(out))

    def __call__(self, g: GroupElement) -> GroupElement:
        """Evaluate on ``prod g_i**a_i * c``; the tail c lies in G' and is killed."""
        pres = self.pres
        out = pres.identity()
        for img, a in zip(self.images, g.a):
            if a:
                out = pres.multiply(out, pres.power(img, a))
        return out

    def is_zero(self) -> bool:
        ident = self.pres.identity()
        return all(x == ident for x in self.images)

    def is_compatible(self) -> bool:
        """Images are central and respect every power relation."""
        pres = self.pres
        ident = pres.identity()
        for i, img in enumerate(self.images):
            if not pres.is_central(img):
                return False
            if pres.power(img, pres.p ** pres.e[i]) != ident:
                return False
        return True

    def __add__(self, other: "CentralHom") -> "CentralHom":
        pres = self.pres
        return CentralHom(pres, tuple(pres.multiply(a, b) for a, b in zip(self.images, other.images)))

    def scale(self, k: int) -> "CentralHom":
        pres = self.pres
        return CentralHom(pres, tuple(pres.power(a, k) for a in self.images))

    def to_json(self) -> dict:
        return {name: img.to_json() for name, img in zip(self.pres.names, self.images)}


def compose(gamma: CentralHom, delta: CentralHom) -> CentralHom:
    """``g -> (g^gamma)^delta``."""
    return CentralHom(gamma.pres, tuple(delta(x) for x in gamma.images))


def circle(gamma: CentralHom, delta: CentralHom) -> CentralHom:
    return gamma + delta + compose(gamma, delta)


@dataclass(frozen=True)
class Automorphism:
    """The automorphism ``g -> g * g^gamma``."""

    gamma: CentralHom

    def __call__(self, g: GroupElement) -> GroupElement:
        return self.gamma.pres.multiply(g, self.gamma(g))

    @property
    def images(self) -> tuple[GroupElement, ...]:
        pres = self.gamma.pres
        return tuple(self(pres.gen(i)) for i in range(pres.rank))


def _check_frattini_quotient(pres: PcPresentation) -> StandardSubgroup:
    phi = pres.frattini()
    if len(phi.tails) != pres.d or phi.div != tuple(min(1, x) for x in pres.e):
        raise ValueError("G/Phi(G) is not spanned by the generators")
    return phi


def frattini_matrix(gamma: CentralHom) -> np.ndarray:
    """Matrix of ``1 + gamma`` on G/Phi(G) in the basis of the generators."""
    pres = gamma.pres
    _check_frattini_quotient(pres)
    eye = np.eye(pres.rank, dtype=np.int64)
    moved = np.array([img.a for img in gamma.images], dtype=np.int64).reshape(pres.rank, pres.rank)
    return (eye + moved) % pres.p


def to_automorphism(gamma: CentralHom) -> Automorphism:
    if not gf.is_invertible(frattini_matrix(gamma), gamma.pres.p):
        raise NotBijective("1 + gamma is singular on G/Phi(G)")
    return Automorphism(gamma)


# --- Hom(G, Z(G)) --------------------------------------------------------------


@dataclass
class HomSpace:
    """Hom(G, Z(G)) as the product of the subgroups ``Z(G) & Omega_{e_i}(G)``
    (the admissible images of ``g_i``)."""

    pres: PcPresentation
    factors: list[StandardSubgroup]
    spanning: list[CentralHom]

    @property
    def log_order(self) -> int:
        return sum(s.log_order for s in self.factors)

    def random(self, rng: np.random.Generator) -> CentralHom:
        pres = self.pres
        images = []
        for s in self.factors:
            g = pres.identity()
            for h in s.generators():
                g = pres.multiply(g, pres.power(h, int(rng.integers(0, pres.element_order(h)))))
            images.append(g)
        return CentralHom(pres, tuple(images))


def hom_space(pres: PcPresentation) -> HomSpace:
    """Spanning set of (Hom(G, Z(G)), +).

    A map on generators extends to a hom into the abelian group Z(G) iff it
    kills the tail (which must lie in G') and respects ``g_i**(p**e_i) = w_i``,
    i.e. the image of ``g_i`` has order dividing ``p**e_i``.
    """
    derived = pres.derived_subgroup()
    if len(derived.tails) != pres.d:
        raise ValueError("the central tail is not contained in G'")
    z = pres.center()
    factors = [z & pres.omega(e) for e in pres.e]
    spanning = []
    for i, s in enumerate(factors):
        for g in s.generators():
            spanning.append(CentralHom.from_images(pres, {i: g}))
    return HomSpace(pres, factors, spanning)


def autc_order(pres: PcPresentation) -> int:
    """|Aut_c(G)|, counted as |Hom(G, Z(G))|.

    Exact when every hom takes values in Phi(G): then each ``1 + gamma`` is
    the identity on G/Phi(G) and hence bijective.
    """
    hs = hom_space(pres)
    phi = pres.frattini()
    if not all(s <= phi for s in hs.factors):
        raise Inconclusive("some homs leave Phi(G); bijectivity would need a case-by-case count")
    return pres.p**hs.log_order


def hom_order(gamma: CentralHom, limit: int = 10**6) -> int:
    """Order of ``gamma`` in (Hom, circle)."""
    k, acc = 1, gamma
    while not acc.is_zero():
        acc = circle(acc, gamma)
        k += 1
        if k > limit:
            raise Inconclusive("order search exceeded its limit")
    return k


def noncommuting_witness(pres: PcPresentation) -> tuple[CentralHom, CentralHom]:
    """``gamma: x1 -> x1^p`` and ``delta: x1 -> x2^p``, all other generators to 1."""
    p = pres.p
    gamma = CentralHom.from_images(pres, {"x1": pres.power(pres.gen("x1"), p)})
    delta = CentralHom.from_images(pres, {"x1": pres.power(pres.gen("x2"), p)})
    return gamma, delta


@dataclass
class StructureVerdict:
    structure: str
    witness: dict[str, Any] = field(default_factory=dict)


def aut_structure(
    pres: PcPresentation, hs: HomSpace | None = None, samples: int = 1000, seed: int = 0
) -> StructureVerdict:
    """Decide abelian / elementary abelian / nonabelian from the spanning set.

    Composition is biadditive, so commuting on spanning pairs means commuting
    everywhere, and the circle operation then agrees with ``+`` up to a
    symmetric term.
    """
    hs = hom_space(pres) if hs is None else hs
    span = hs.spanning
    comps = {}
    for (i, a), (j, b) in itertools.product(enumerate(span), repeat=2):
        comps[i, j] = compose(a, b)
    for (i, j), ab in comps.items():
        if i < j and ab != comps[j, i]:
            return StructureVerdict(
                "nonabelian",
                {"gamma": span[i].to_json(), "delta": span[j].to_json(),
                 "gamma_delta": ab.to_json(), "delta_gamma": comps[j, i].to_json()},
            )
    if all(c.is_zero() for c in comps.values()) and all(g.scale(pres.p).is_zero() for g in span):
        return StructureVerdict("elementary_abelian", {"spanning": len(span)})
    rng = np.random.default_rng(seed)
    for g in itertools.chain(span, (hs.random(rng) for _ in range(samples))):
        k = hom_order(g)
        if k > pres.p:
            return StructureVerdict("abelian", {"exponent_witness": g.to_json(), "order": k})
    raise Inconclusive("abelian, but no element of order > p was found")


# --- Aut(G) = Aut_c(G) -----------------------------------------------------------


@dataclass
class AutCertificate:
    construction: str
    aut_equals_autc: bool
    method: str
    structure: str | None = None
    autc_log_order: int | None = None
    p: int = 0
    witness: dict[str, Any] = field(default_factory=dict)
    centralizer: CentralizerReport | None = None
    blocks: dict[str, Any] = field(default_factory=dict)

    @property
    def autc_order(self) -> int | None:
        return None if self.autc_log_order is None else self.p**self.autc_log_order

    def to_json(self) -> dict:
        return {
            "construction": self.construction,
            "aut_equals_autc": self.aut_equals_autc,
            "structure": self.structure,
            "autc_order": None if self.autc_log_order is None else f"{self.p}^{self.autc_log_order}",
            "autc_log_order": self.autc_log_order,
            "witness": self.witness,
            "centralizer": None if self.centralizer is None else self.centralizer.to_json(),
            "blocks": self.blocks,
            "method": self.method,
        }


def _lift(t, w: np.ndarray) -> np.ndarray:
    """Vector of the exterior square with coset coordinates ``w``."""
    v = np.zeros(wedge_dim(t.n), dtype=np.int64)
    v[list(t.k.free_coords)] = w
    return v


def _scalar_multiple(v: np.ndarray, base: np.ndarray, p: int) -> int | None:
    """The s with ``v = s * base``, or None."""
    sol = gf.solve_linear(base.reshape(-1, 1), v, p)
    return None if sol is None else int(sol.particular[0])


def central_product_blocks(pres: PcPresentation, workers: int = 1) -> dict[str, Any]:
    """All block matrices ``[[alpha, lambda], [nu, mu]]`` on G/G' = V + <w>
    compatible with the relations of the central product.

    Necessary conditions used: z^phi is central (nu ^ V inside K), the
    induced map on G' is alpha^ and preserves K, and both sides of
    ``(v^p)^phi = (v^phi)^p`` agree for v = x_i and v = z.
    """
    t = pres.meta["tat"]
    p, n = t.p, t.n
    c0 = _lift(t, pres.meta["c0"])
    # nu: z^phi central forces nu ^ V inside K
    nu_space = gf.nullspace(_nu_system(t), p)
    k_big = QuotientSpace.of(n, p, np.vstack([t.k.basis, c0]))
    problem = SwitchProblem(p, n, t.f, k_big, (t.k, k_big))
    rep = solve_switch(problem, workers=workers, cap=256)
    solutions = []
    for alpha in rep.elements:
        hat = induced_map(alpha, p)
        disc = t.k.project(t.f @ hat - alpha @ t.f)
        lam = [_scalar_multiple(row, t.k.project(c0), p) for row in disc]
        mu = _scalar_multiple(t.k.project(c0 @ hat), t.k.project(c0), p)
        if None in lam or not mu:
            continue
        solutions.append({"alpha": gf.to_json(alpha), "lambda": lam, "mu": mu})
    return {
        "nu_solutions_dim": int(len(nu_space)),
        "alpha_candidates": rep.count,
        "solutions": solutions if len(nu_space) == 0 else None,
        "search": rep,
    }


def _nu_system(t) -> np.ndarray:
    """Rows: the linear map ``nu -> (nu ^ e_i mod K)_i``."""
    p, n = t.p, t.n
    cols = []
    for a in range(n):
        unit = np.eye(n, dtype=np.int64)[a]
        cols.append((wedge_operator(unit, p) @ t.k.projection % p).reshape(-1))
    return np.stack(cols, axis=1)


def extension_blocks(pres: PcPresentation, workers: int = 1) -> dict[str, Any]:
    """All block matrices ``[[tau, sigma], [rho, alpha]]`` on G/Phi(G) = <u> + V
    compatible with the relations of the extension by y.

    ``rho = 0`` is read off from Omega_2(G); the remaining conditions are the
    power relations of y and of the x_i and the commutator relations
    ``[x_i, y] = x_i gamma``.
    """
    t = pres.meta["tat"]
    p, n = t.p, t.n
    c0 = np.asarray(pres.meta["c0"], dtype=np.int64)
    gamma = np.asarray(pres.meta["gamma"], dtype=np.int64)
    # image of Omega_2 in G/Phi: u-coordinate (generator y) must vanish
    omega2 = pres.omega(2)
    y = pres.names.index("y")
    gens = omega2.generators()
    rows = np.array([[g.a[i] % p for i in range(pres.rank)] for g in gens], dtype=np.int64).reshape(-1, pres.rank)
    omega_rank_v = gf.rank(np.delete(rows, y, axis=1), p) if len(rows) else 0
    rho_zero = bool(not (rows[:, y] % p).any()) and omega_rank_v == n

    c0_line = QuotientSpace.of(n, p, c0)
    problem = SwitchProblem(p, n, t.f, c0_line, (c0_line,))
    rep = solve_switch(problem, workers=workers, cap=256)
    solutions = []
    for alpha in rep.elements:
        hat = induced_map(alpha, p)
        tau = _scalar_multiple(c0 @ hat % p, c0, p)
        if not tau:
            continue
        # alpha_i ^ sigma = gamma_i alpha^ - tau (alpha_i gamma), for every i
        lhs = np.concatenate([wedge_operator(alpha[i], p) for i in range(n)], axis=1)
        rhs = np.concatenate([(gamma[i] @ hat - tau * (alpha[i] @ gamma)) % p for i in range(n)])
        sol = gf.solve_left(lhs, rhs, p)
        if sol is None:
            continue
        if len(sol.nullspace):
            sigmas = [(sol.particular + np.array(c) @ sol.nullspace) % p
                      for c in itertools.product(range(p), repeat=len(sol.nullspace))]
        else:
            sigmas = [sol.particular]
        for sigma in sigmas:
            solutions.append({"tau": tau, "sigma": gf.to_json(sigma), "alpha": gf.to_json(alpha)})
    return {"rho_zero": rho_zero, "alpha_candidates": rep.count, "solutions": solutions, "search": rep}


def _is_identity_block(sol: dict, n: int) -> bool:
    alpha = np.asarray(sol["alpha"])
    ok = np.array_equal(alpha, np.eye(n, dtype=np.int64))
    if "lambda" in sol:
        return ok and not any(sol["lambda"]) and sol["mu"] == 1
    return ok and sol["tau"] == 1 and not any(sol["sigma"])


def verify_aut_central(pres: PcPresentation, tag: str | None = None, workers: int = 1) -> AutCertificate:
    """Decide whether every automorphism of G is central."""
    tag = tag or pres.construction
    t = pres.meta["tat"]
    cert = AutCertificate(tag, False, "", p=pres.p)
    if tag in (SPECIAL, ZUREK):
        rep = centralizer(t, workers=workers)
        cert.centralizer = rep
        cert.aut_equals_autc = rep.complete and rep.count == 1
        cert.method = "switch condition: automorphisms induce elements of the TAT centralizer on G/Phi"
    elif tag == CENTRAL_PRODUCT:
        blocks = central_product_blocks(pres, workers)
        cert.centralizer = blocks.pop("search")
        sols = blocks["solutions"]
        cert.blocks = blocks
        cert.aut_equals_autc = (
            blocks["nu_solutions_dim"] == 0 and sols is not None and len(sols) == 1
            and _is_identity_block(sols[0], t.n)
        )
        cert.method = "block solve (alpha, lambda, mu) on G/G' = V + <w>"
    elif tag == EXTENSION:
        blocks = extension_blocks(pres, workers)
        cert.centralizer = blocks.pop("search")
        sols = blocks["solutions"]
        cert.blocks = blocks
        cert.aut_equals_autc = (
            blocks["rho_zero"] and len(sols) == 1 and _is_identity_block(sols[0], t.n)
        )
        cert.method = "block solve (tau, sigma, alpha) on G/Phi = <u> + V, Omega_2 fixes the shape"
    else:
        raise ValueError(f"unknown construction {tag!r}")
    return cert


def certify(pres: PcPresentation, tag: str | None = None, workers: int = 1, seed: int = 0) -> AutCertificate:
    """Full certificate: Aut = Aut_c, the structure of Aut_c and its order."""
    cert = verify_aut_central(pres, tag, workers)
    if not cert.aut_equals_autc:
        return cert
    hs = hom_space(pres)
    verdict = aut_structure(pres, hs, seed=seed)
    cert.structure = verdict.structure
    cert.witness = verdict.witness
    if cert.construction == ZUREK:
        gamma, delta = noncommuting_witness(pres)
        cert.witness = {
            "gamma": gamma.to_json(),
            "delta": delta.to_json(),
            "x1_gamma_delta": compose(gamma, delta).images[0].to_json(),
            "x1_delta_gamma": compose(delta, gamma).images[0].to_json(),
            "search": verdict.witness,
        }
    autc_order(pres)  # raises when the count would not be exact
    cert.autc_log_order = hs.log_order
    return cert
