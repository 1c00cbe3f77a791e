import pytest

from h3nr import groups as grp
from h3nr.cohomology import CohomologyData
from h3nr.negligible import (RefusedError, SubgroupOfH4, choose_subgroups_h1_trivial, choose_subgroups_h4p,
                             h4n, h4p, stable_cohomology_h3s)

from conftest import load, rg


def test_choose_subgroups_abelian_is_whole_group():
    G = grp.abelian_group([3, 9])
    assert [H.order for H in choose_subgroups_h4p(G)] == [27]


def test_choose_subgroups_243_56():
    orders = sorted(H.order for H in choose_subgroups_h4p(load("G_243_56")))
    assert orders == [27] * 7 + [81] * 4 + [243]


def test_choose_subgroups_3125_66():
    assert len(choose_subgroups_h4p(load("G_3125_66"))) == 18


def test_h1_trivial_subgroups():
    assert choose_subgroups_h1_trivial(grp.cyclic_group(1)) == []
    assert sorted(H.order for H in choose_subgroups_h1_trivial(load("PSL_2_8"))) == [8, 9, 18, 56]
    assert len(choose_subgroups_h1_trivial(load("A6"))) == 7


def test_a6_maximal_subgroups():
    G = load("A6")
    M = G.maximal_subgroup_classes()
    assert sorted(H.order for H in M) == [24, 24, 36, 60, 60]
    for H in M:
        if H.order == 60:
            assert G.derived_subgroup(H).order == 60
        elif H.order == 24:
            assert G.abelian_invariants(H) == [2]
        else:
            assert G.abelian_invariants(H) == [4]


def test_pruning_does_not_change_h4p():
    for name in ["G_27_3", "G_81_3", "G_81_7", "G_81_10"]:
        R = rg(name)
        assert h4p(R, prune=True) == h4p(R, prune=False)


def test_h4p_extraspecial_27_is_everything():
    assert h4p(rg("G_27_3")).is_everything()


def test_h4p_243_56():
    P = h4p(rg("G_243_56"))
    assert P.torsion == [3] * 7
    assert P.invariants() == [3] * 5


def test_h4p_243_28_contains_three_times_order_nine_class():
    R = rg("G_243_28")
    P = h4p(R)
    data = P.ambient
    assert sorted(data.torsion_coefficients) == [3, 3, 9]
    assert P.invariants() == [3, 3, 3]
    nine = [v for v in data.basis() if v.order() == 9][0]
    assert 3 * nine in P
    assert nine not in P


def test_h4n_equals_h4p_for_odd_order():
    for name in ["G_27_3", "G_81_7", "G_243_57"]:
        R = rg(name)
        assert h4n(R) == h4p(R)


def test_h4n_refused_for_2_groups():
    with pytest.raises(RefusedError):
        h4n(rg("G_16_3"))


def test_stable_cohomology():
    assert stable_cohomology_h3s(rg("G_243_1")) == []
    assert stable_cohomology_h3s(rg("G_243_56")) == [3, 3]
    assert stable_cohomology_h3s(rg("G_3125_33")) == [5, 5]


def test_subgroup_of_h4_operations():
    R = rg("G_9_2")
    data = CohomologyData(R, 4)
    assert data.torsion_coefficients == [3, 3, 3]
    a, b, c = data.basis()
    S = SubgroupOfH4(data, [a])
    T = SubgroupOfH4(data, [a, b])
    assert S.order == 3 and T.order == 9 and T.index() == 3
    assert S <= T and not T <= S
    assert S.join(SubgroupOfH4(data, [b])) == T
    assert T.quotient_invariants() == [3]
    assert T.quotient_invariants(S) == [3]
    reps = list(T.coset_representatives())
    assert len(reps) == 3
    assert sum(v in T for v in reps) == 1
    assert SubgroupOfH4(data, data.basis()).is_everything()
