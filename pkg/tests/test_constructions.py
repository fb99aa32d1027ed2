import numpy as np
import pytest

from abelaut import constructions as cons
from abelaut.group import lattice_relation
from abelaut.tat import InvalidTat, TatCandidate, verify_injective
from abelaut.wedge import wedge_operator


def test_orders(groups):
    assert groups[cons.SPECIAL].log_order == 10
    assert groups[cons.ZUREK].log_order == 14
    assert groups[cons.CENTRAL_PRODUCT].log_order == 11
    assert groups[cons.EXTENSION].log_order == 12


@pytest.mark.parametrize("tag", cons.TAGS)
def test_lattice_matches_claim_sheet(groups, tag):
    assert lattice_relation(groups[tag]) == cons.claim_sheet(tag).lattice


def test_special_group_facts(groups):
    g = groups[cons.SPECIAL]
    assert g.is_special()
    assert g.agemo() <= g.derived_subgroup() == g.omega(1)
    assert g.log_order - g.derived_subgroup().log_order == g.agemo().log_order == 4


def test_central_product_center(groups):
    g = groups[cons.CENTRAL_PRODUCT]
    z = g.center()
    assert g.gen("z") in z
    assert z.log_order == g.derived_subgroup().log_order + 1
    # z^p lies in H' but outside H^p
    zp = g.power(g.gen("z"), 3)
    assert zp in g.derived_subgroup()
    h_p = np.array(g.power_tails[:4])
    from abelaut import gf
    assert gf.rank(np.vstack([h_p, zp.c]), 3) == gf.rank(h_p, 3) + 1


def test_extension_omega_and_frattini(groups):
    g = groups[cons.EXTENSION]
    omega2 = g.omega(2)
    assert g.gen("y") not in omega2
    assert all(g.gen(f"x{i}") in omega2 for i in range(1, 5))
    yp = g.power(g.gen("y"), 3)
    assert yp in g.frattini() and yp not in g.derived_subgroup()
    assert g.frattini().log_order == g.derived_subgroup().log_order + 1


def test_extension_commutators(tat, groups):
    g = groups[cons.EXTENSION]
    y = g.gen("y")
    for i in range(4):
        assert list(g.commutator(g.gen(f"x{i + 1}"), y).c) == list(tat.f[i])


def test_injectivity_ties_to_agemo(tat):
    assert verify_injective(tat)
    assert cons.build_special(tat, check=False).agemo().log_order == 4
    f = np.array(tat.f)
    f[3] = (f[0] + f[1]) % 3
    bad = TatCandidate.build(3, 4, f)
    assert not verify_injective(bad)
    assert cons.build_special(bad, check=False).agemo().log_order < 4


def test_builders_check_the_tat(tat, bad_k_basis):
    with pytest.raises(InvalidTat):
        cons.build_special(TatCandidate.build(3, 4, np.zeros((4, 6), int)))
    with pytest.raises(InvalidTat):
        cons.build_zurek(TatCandidate.build(3, 4, tat.f, bad_k_basis))


def test_extension_preconditions(tat):
    with pytest.raises(ValueError):
        cons.build_extension(tat, m=1, check=False)
    with pytest.raises(cons.BadGamma):
        cons.build_extension(tat, gamma=np.zeros((4, 6), int), check=False)
    inner = wedge_operator([1, 0, 2, 0], 3)
    with pytest.raises(cons.BadGamma):
        cons.build_extension(tat, gamma=inner, check=False)
    k = TatCandidate.build(3, 4, tat.f, [[0, 0, 0, 0, 0, 1]])
    with pytest.raises(InvalidTat):
        cons.build_extension(k, check=False)


def test_inner_maps_are_never_injective():
    rng = np.random.default_rng(0)
    from abelaut import gf
    for _ in range(50):
        v = rng.integers(0, 3, size=4)
        g = wedge_operator(v, 3)
        assert cons.is_inner_shaped(g, 3)
        assert gf.rank(g, 3) < 4


def test_extension_m3(tat):
    g = cons.build_extension(tat, m=3, check=False)
    assert g.log_order == 13
    assert g.element_order(g.gen("y")) == 3**4
    assert lattice_relation(g) == "G'<Phi=Z"


def test_amalgam_obstruction():
    assert cons.first_outside(np.eye(3, dtype=int), 3, 3) is None
    assert cons.first_outside(np.zeros((0, 2), int), 2, 3).tolist() == [0, 1]


def test_claim_sheet():
    assert cons.claim_sheet(cons.ZUREK).aut_structure == "nonabelian"
    assert cons.claim_sheet(cons.CENTRAL_PRODUCT).aut_structure == "elementary_abelian"
    assert cons.claim_sheet(cons.EXTENSION).aut_structure == "abelian"
    assert cons.claim_sheet(cons.SPECIAL).aut_equals_autc
    with pytest.raises(ValueError):
        cons.build("other", None)
