import json
from functools import reduce

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from abelaut import constructions as cons
from abelaut.group import GroupElement, PcPresentation, Relation, StandardSubgroup, subgroup_compare, subgroup_order
from abelaut.wedge import QuotientSpace, check_wedge_condition, wedge
from abelaut.tat import TatCandidate

SLOW = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])


@st.composite
def small_presentations(draw):
    """Random class-two presentations small enough to enumerate (p = 3)."""
    p = 3
    r = draw(st.integers(1, 3))
    d = draw(st.integers(1, 2))
    e = draw(st.lists(st.integers(1, 2), min_size=r, max_size=r))
    # keep |G| <= 3^5 so brute-force closures stay cheap
    d = min(d, max(1, 5 - sum(e)))
    if sum(e) + d > 5:
        e = [1] * r
    vec = st.lists(st.integers(0, p - 1), min_size=d, max_size=d)
    tails = draw(st.lists(vec, min_size=r, max_size=r))
    comm = {(i, j): draw(vec) for i in range(r) for j in range(i + 1, r)}
    names = [f"g{i}" for i in range(r)]
    return PcPresentation.from_tables(p, names, e, np.array(tails).reshape(r, d), comm, d)


def elements(g: PcPresentation):
    out = []
    for code in range(g.order):
        a, c = [], []
        for x in g.e:
            a.append(code % g.p**x)
            code //= g.p**x
        for _ in range(g.d):
            c.append(code % g.p)
            code //= g.p
        out.append(GroupElement(tuple(a), tuple(c)))
    return out


def closure(g: PcPresentation, gens):
    seen = {g.identity()}
    frontier = list(seen)
    gens = [x for x in gens if x != g.identity()]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = g.multiply(x, s)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def brute_subgroups(g):
    els = elements(g)
    p = g.p
    center = {x for x in els if g.is_central(x)}
    derived = closure(g, [g.commutator(x, y) for x in els for y in els])
    agemo = closure(g, [g.power(x, p) for x in els])
    frattini = closure(g, list(agemo) + list(derived))
    omega = {k: closure(g, [x for x in els if g.power(x, p**k) == g.identity()]) for k in (1, 2)}
    return els, center, derived, agemo, frattini, omega


def as_set(s: StandardSubgroup, els):
    return {x for x in els if x in s}


@given(small_presentations())
@settings(max_examples=40, deadline=None)
def test_subgroups_match_brute_force(g):
    els, center, derived, agemo, frattini, omega = brute_subgroups(g)
    assert as_set(g.center(), els) == center
    assert as_set(g.derived_subgroup(), els) == derived
    assert as_set(g.agemo(), els) == agemo
    assert as_set(g.frattini(), els) == frattini
    for k in (1, 2):
        assert as_set(g.omega(k), els) == omega[k]
    for s in (g.center(), g.derived_subgroup(), g.agemo(), g.frattini(), g.omega(1)):
        assert s.order == len(as_set(s, els))
        assert closure(g, s.generators()) == as_set(s, els)


@given(small_presentations())
@settings(max_examples=12, deadline=None)
def test_intersection_and_order_match_brute_force(g):
    els = elements(g)
    subs = [g.center(), g.derived_subgroup(), g.agemo(), g.frattini(), g.omega(1), g.omega(2), g.whole()]
    for a in subs:
        for b in subs:
            both = a & b
            assert as_set(both, els) == as_set(a, els) & as_set(b, els)
            assert (a <= b) == (as_set(a, els) <= as_set(b, els))


@given(small_presentations(), st.data())
@settings(max_examples=60, deadline=None)
def test_group_axioms_small(g, data):
    els = elements(g)
    pick = st.sampled_from(els)
    x, y, z = data.draw(pick), data.draw(pick), data.draw(pick)
    m = g.multiply
    assert m(m(x, y), z) == m(x, m(y, z))
    assert m(x, g.inverse(x)) == g.identity() == m(g.inverse(x), x)
    assert m(x, g.identity()) == x
    # [x, y] = x^-1 y^-1 x y
    assert g.commutator(x, y) == m(m(g.inverse(x), g.inverse(y)), m(x, y))
    assert g.power(x, g.element_order(x)) == g.identity()


# --- constructed groups ------------------------------------------------------


@pytest.mark.parametrize("tag", cons.TAGS)
def test_associativity_and_inverse(groups, tag):
    g = groups[tag]
    rng = np.random.default_rng(0)
    for _ in range(2000):
        x, y, z = (g.random_element(rng) for _ in range(3))
        assert g.multiply(g.multiply(x, y), z) == g.multiply(x, g.multiply(y, z))
        assert g.multiply(x, g.inverse(x)) == g.identity()


@pytest.mark.parametrize("tag", cons.TAGS)
def test_p_power_is_a_homomorphism(groups, tag):
    g = groups[tag]
    rng = np.random.default_rng(1)
    for _ in range(500):
        x, y = g.random_element(rng), g.random_element(rng)
        assert g.multiply(g.power(x, g.p), g.power(y, g.p)) == g.power(g.multiply(x, y), g.p)
        assert g.commutator(x, x) == g.identity()


@pytest.mark.parametrize("tag", cons.TAGS)
def test_commutator_bilinear(groups, tag):
    g = groups[tag]
    rng = np.random.default_rng(2)
    for _ in range(500):
        x, y, z = (g.random_element(rng) for _ in range(3))
        assert g.commutator(g.multiply(x, y), z) == g.multiply(g.commutator(x, z), g.commutator(y, z))
        assert g.is_central(g.commutator(x, y))


def test_commutator_agrees_with_wedge(tat, groups):
    g = groups[cons.SPECIAL]
    rng = np.random.default_rng(3)
    free = list(tat.k.free_coords)
    from abelaut.wedge import wedge
    for _ in range(300):
        x, y = g.random_element(rng), g.random_element(rng)
        expected = tat.k.project(wedge(x.a, y.a, 3))[free]
        assert list(g.commutator(x, y).c) == list(expected)


def test_basic_relations(tat, groups):
    g = groups[cons.SPECIAL]
    x1, x2 = g.gen("x1"), g.gen("x2")
    lhs, rhs = g.multiply(x1, x2), g.multiply(x2, x1)
    assert lhs.a == rhs.a
    assert g.multiply(rhs, g.commutator(x1, x2)) == lhs
    assert g.multiply(g.power(x1, 2), x1) == GroupElement((0,) * 4, tuple(tat.f[0]))
    assert g.multiply(x1, g.identity()) == x1


def test_orders_of_generators(groups):
    z = groups[cons.ZUREK]
    assert all(z.element_order(z.gen(i)) == 27 for i in range(4))
    cp = groups[cons.CENTRAL_PRODUCT]
    assert cp.element_order(cp.gen("z")) == 9
    ext = groups[cons.EXTENSION]
    assert ext.element_order(ext.gen("y")) == 27


def test_subgroup_examples(groups):
    s = groups[cons.SPECIAL]
    assert s.center() == s.frattini() == s.derived_subgroup() == s.omega(1)
    assert subgroup_order(s.center()) == 3**6
    assert s.is_special()
    z = groups[cons.ZUREK]
    assert subgroup_compare(z.derived_subgroup(), z.frattini()) is Relation.SUBSET
    assert subgroup_compare(z.frattini(), z.center()) is Relation.EQUAL
    assert z.is_purely_nonabelian_certificate()
    cp = groups[cons.CENTRAL_PRODUCT]
    assert cp.derived_subgroup() == cp.frattini() < cp.center()
    assert not cp.is_special()
    assert subgroup_compare(s.center(), s.center()) is Relation.EQUAL


def test_order_bookkeeping(groups):
    for g in groups.values():
        assert g.order == g.p ** (sum(g.e) + g.d)
        rng = np.random.default_rng(4)
        for s in (g.center(), g.derived_subgroup(), g.frattini(), g.agemo(), g.omega(1), g.omega(2)):
            # |G| = |S| * |G/S| counted via membership of random elements is too weak;
            # instead count S exactly on a slice: every generator lies in S
            assert all(x in s for x in s.generators())
            assert 0 <= s.log_order <= g.log_order
            x = g.random_element(rng)
            y = g.random_element(rng)
            if x in s and y in s:
                assert g.multiply(x, y) in s


def test_wedge_condition_iff_center_is_frattini(tat, bad_k_basis):
    good = cons.build_special(tat, check=False)
    assert good.center() == good.frattini()
    bad = TatCandidate.build(3, 4, tat.f, bad_k_basis)
    assert not check_wedge_condition(bad.k)
    g = cons.build_special(bad, check=False)
    assert g.frattini() < g.center()


def test_wedge_condition_iff_center_is_frattini_random():
    rng = np.random.default_rng(9)
    seen = set()
    for _ in range(200):
        rows = rng.integers(0, 3, size=(int(rng.integers(0, 3)), 6))
        if rng.integers(0, 2):
            v = rng.integers(0, 3, size=4)
            rows = np.vstack([rows] + [wedge(v, u, 3) for u in np.eye(4, dtype=int)])
        k = QuotientSpace.of(4, 3, rows)
        if k.dim > 5 or k.dim < 1:
            continue
        f = rng.integers(0, 3, size=(4, 6))
        t = TatCandidate(3, 4, k, f)
        g = cons.build_special(t, check=False)
        # G' = Phi holds when the power tails lie in G'; Z = Phi then tracks the wedge condition
        ok = check_wedge_condition(k)
        seen.add(ok)
        assert (g.center() == g.derived_subgroup()) == ok
    assert seen == {True, False}


@pytest.mark.parametrize("tag", cons.TAGS)
def test_json_roundtrip(groups, tag):
    g = groups[tag]
    data = json.loads(json.dumps(g.to_json()))
    assert data["schema"] == 1
    assert PcPresentation.from_json(data) == g


def test_element_json_and_shape_check(groups):
    g = groups[cons.SPECIAL]
    x = g.random_element(np.random.default_rng(0))
    assert GroupElement.from_json(json.loads(json.dumps(x.to_json()))) == x
    with pytest.raises(ValueError):
        g.multiply(x, GroupElement((1,), (0,)))
