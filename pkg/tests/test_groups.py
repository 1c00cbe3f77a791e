import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from h3nr import groups as grp
from h3nr.groups import GroupHomomorphism

from conftest import load, small_group_names

# (name, number of conjugacy classes of subgroups)
SUBGROUP_CLASS_COUNTS = [("G_6_1", 4), ("G_8_3", 8), ("G_8_4", 6), ("G_8_5", 16), ("S4", 11), ("G_16_14", 67)]


@pytest.mark.parametrize("name", small_group_names(16) + ["S4", "G_27_3", "G_81_3"])
def test_group_axioms(name):
    G = load(name)
    assert G.is_associative()
    n = G.order
    assert (np.sort(G.mul, axis=1) == np.arange(n)).all()
    assert (G.mul[np.arange(n), G.inv] == 0).all()
    assert int(np.prod(G.abelian_invariants())) * G.derived_subgroup().order == n
    inv = G.abelian_invariants()
    assert all(b % a == 0 for a, b in zip(inv, inv[1:]))


@pytest.mark.parametrize("name,count", SUBGROUP_CLASS_COUNTS)
def test_subgroup_class_counts(name, count):
    G = load(name)
    classes = G.subgroup_classes()
    assert len(classes) == count
    for H in classes:
        assert G.is_subgroup(H.elements)
        assert n_divides(H.order, G.order)
    # conjugacy classes of subgroups are disjoint
    keys = set()
    for H in classes:
        orbit = set(G.conjugates(H))
        assert not keys & orbit
        keys |= orbit


def n_divides(a, b):
    return b % a == 0


def test_structural_queries_on_d4():
    G = load("G_8_3")
    assert G.center().order == 2
    assert G.derived_subgroup().order == 2
    assert [H.order for H in G.lower_central_series()] == [8, 2, 1]
    assert sorted(H.order for H in G.maximal_subgroup_classes()) == [4, 4, 4]
    Z = G.center()
    assert len(G.double_cosets(Z, Z)) == 4
    assert len(G.right_transversal(Z)) == 4
    assert G.centralizer(Z.elements).order == 8
    assert G.is_nilpotent() and G.is_p_group() and not G.is_abelian()


def test_quotient_and_section():
    G = load("S4")
    V = [H for H in G.subgroup_classes() if H.order == 4 and G.normalizer(H.elements).order == 24][0]
    Q, proj, reps = G.quotient(V)
    assert Q.order == 6 and reps[0] == 0
    hom = GroupHomomorphism(G, Q, proj)
    assert hom.is_homomorphism()


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 6), min_size=1, max_size=3))
def test_abelian_group_invariants(ns):
    A = grp.abelian_group(ns)
    assert A.order == int(np.prod(ns))
    inv = A.abelian_invariants()
    assert int(np.prod(inv)) == A.order
    assert all(b % a == 0 for a, b in zip(inv, inv[1:]))


def test_presentation_orders():
    for name, order in [("G_243_56", 243), ("G_3125_38", 3125), ("A5", 60), ("PSL_2_8", 504)]:
        assert load(name).order == order


def test_power_and_orders():
    G = grp.cyclic_group(12)
    assert G.exponent == 12
    g = G.generators[0]
    assert G.element_order(g) == 12
    assert G.power(g, 12) == 0


def test_bad_homomorphism_rejected():
    C4, C2 = grp.cyclic_group(4), grp.cyclic_group(2)
    with pytest.raises(ValueError):
        GroupHomomorphism.from_generators(C2, C4, [C2.generators[0]], [C4.generators[0]])
