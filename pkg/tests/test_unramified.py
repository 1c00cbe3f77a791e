import random

import pytest

from h3nr import groups as grp
from h3nr import resolutions as res
from h3nr.cohomology import CohomologyData
from h3nr.negligible import SubgroupOfH4, h4p
from h3nr.unramified import (ResiduePair, bogomolov_multiplier, choose_hi_pairs, h3nr_of_function_field, h4nr,
                             is_unramified, residue_map)

from conftest import load, rg


@pytest.mark.parametrize("name,filtered", [("G_243_56", 9), ("G_243_58", 13), ("G_243_59", 1)])
def test_pair_counts(name, filtered):
    G = load(name)
    assert len(choose_hi_pairs(G, subgroup_filter=True)) == filtered
    assert len(choose_hi_pairs(G, subgroup_filter=False)) == 17


def test_pairs_are_centralizers_of_central_elements():
    G = load("G_243_58")
    for pair in choose_hi_pairs(G, subgroup_filter=True):
        assert pair.order > 1
        assert pair.H == G.centralizer([pair.g])
        assert pair.cyclic() <= pair.H


@pytest.mark.parametrize("name", ["G_27_3", "G_27_4", "G_81_3", "G_81_8", "G_81_12"])
def test_pruned_pairs_give_the_same_h4nr(name):
    G = load(name)
    R = rg(name)
    P = SubgroupOfH4(CohomologyData(R, 4))
    pruned = h4nr(R, P=P, pairs=choose_hi_pairs(G))
    full = h4nr(R, P=P, pairs=choose_hi_pairs(G, prune=False))
    assert pruned == full
    assert h4p(R) <= pruned


def test_residue_of_zero_is_zero():
    R = rg("G_243_56")
    data = CohomologyData(R, 4)
    for pair in choose_hi_pairs(R.group, subgroup_filter=True):
        assert residue_map(R, pair, data=data)(data.zero()).is_zero()


def test_residue_of_order_nine_class_243_28():
    R = rg("G_243_28")
    data = CohomologyData(R, 4)
    pairs = choose_hi_pairs(R.group, subgroup_filter=True)
    assert len(pairs) == 1
    rm = residue_map(R, pairs[0], data=data)
    assert rm.target.torsion_coefficients == [9]
    nine = [v for v in data.basis() if v.order() == 9][0]
    r = rm(nine)
    assert r.order() == 3


def test_unramified_verdicts_243_56():
    R = rg("G_243_56")
    data = CohomologyData(R, 4)
    pairs = choose_hi_pairs(R.group, subgroup_filter=True)
    P = h4p(R, data=data)
    NR = h4nr(R, P=P, data=data, pairs=pairs)
    assert NR.index() == 3 and P.index() == 9
    verdicts = set()
    for v in P.coset_representatives():
        u = is_unramified(v, R, pairs=pairs, data=data)
        assert u == (v in NR)
        verdicts.add(u)
    assert verdicts == {True, False}


def test_modes_agree():
    R = rg("G_243_56")
    data = CohomologyData(R, 4)
    pairs = choose_hi_pairs(R.group, subgroup_filter=True)
    ex = h4nr(R, data=data, pairs=pairs, mode="exhaustive")
    assert h4nr(R, data=data, pairs=pairs, mode="kernel") == ex
    gen = h4nr(R, data=data, pairs=pairs, mode="generators")
    assert h4p(R, data=data) <= gen <= ex
    with pytest.raises(ValueError):
        h4nr(R, data=data, pairs=pairs, bound=2, fallback=False)


def test_residues_are_conjugation_invariant():
    R = rg("G_243_56")
    G = R.group
    data = CohomologyData(R, 4)
    rng = random.Random(11)
    for pair in choose_hi_pairs(G, subgroup_filter=True)[:4]:
        x = rng.randrange(1, G.order)
        g2 = int(G.mul[G.mul[G.inv[x], pair.g], x])
        if g2 == pair.g:
            continue
        other = ResiduePair(G, g2)
        r1, r2 = residue_map(R, pair, data=data), residue_map(R, other, data=data)
        for v in data.basis():
            assert r1(v).is_zero() == r2(v).is_zero()
            assert r1(v).order() == r2(v).order()


def test_h4nr_243_58():
    R = rg("G_243_58")
    NR = h4nr(R, pairs=choose_hi_pairs(R.group, subgroup_filter=True))
    assert NR.torsion == [3] * 9
    assert NR.invariants() == [3] * 7


def test_h4nr_3125_34():
    R = rg("G_3125_34")
    NR = h4nr(R, pairs=choose_hi_pairs(R.group, subgroup_filter=True))
    assert NR.torsion == [5] * 4
    assert NR.invariants() == [5] * 3


def test_h4nr_bicyclic_is_everything():
    R = res.default_cache.get(grp.abelian_group([3, 9]))
    assert h4nr(R).is_everything()


def test_h3nr_abelian_is_zero():
    # the triple-product class of (Z/3)^3 is ramified, so H4_nr is not all of H^4,
    # but it coincides with the negligible classes
    R = res.default_cache.get(grp.abelian_group([3, 3, 3]))
    data = CohomologyData(R, 4)
    NR = h4nr(R, data=data)
    assert data.torsion_coefficients == [3] * 7
    assert NR == h4p(R, data=data)
    assert h3nr_of_function_field(R, data=data) == []


def test_h3nr_phi10_order_243_is_zero():
    R = rg("G_243_28")
    assert h3nr_of_function_field(R, subgroup_filter=True) == []


@pytest.mark.parametrize("name,b0", [("G_27_1", []), ("G_243_28", [3]), ("G_243_56", []), ("G_8_3", [])])
def test_bogomolov_multiplier(name, b0):
    R = rg(name)
    assert bogomolov_multiplier(R.group, R) == b0
