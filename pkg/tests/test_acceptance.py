"""Acceptance criteria, one marker per criterion.

A summary line per criterion is printed at the end of the pytest run.
Criterion 8 (extended tier) is not gating; it runs with H3NR_EXTENDED=1.
"""

import math
import random
import time

import numpy as np
import pytest

from h3nr import groups as grp
from h3nr import maps
from h3nr import oracle
from h3nr import resolutions as res
from h3nr import zmatrix
from h3nr.cohomology import CohomologyData
from h3nr.negligible import SubgroupOfH4, choose_subgroups_h1_trivial, h4n, h4p
from h3nr.unramified import choose_hi_pairs, h4nr, residue_map

from conftest import CRITERIA, RECORDS, load, record, rg, small_group_names
from test_zmatrix import check_snf

DESCRIPTIONS = {
    1: "resolution ranks 1,5,15,35,70,126 for G(243,28), G(243,56)",
    2: "G(243,56) golden run",
    3: "G(243,28..30) golden runs",
    4: "Phi7 family sweep G(243,56..60)",
    5: "G(3125,38) spot check",
    6: "oracle equivalence suite",
    7: "invariant suite",
    8: "extended tier PSL2(F8), A6 (not gating)",
}

MIN = 60


def budget(k, seconds):
    """Total recorded time of criterion k so far stays within its target."""
    spent = sum(d for _, o, d in CRITERIA.get(k, []))
    assert spent < seconds, f"criterion {k} took {spent:.0f}s, target {seconds}s"


# -- 1 ------------------------------------------------------------------------------

@pytest.mark.criterion(1)
@pytest.mark.parametrize("name", ["G_243_28", "G_243_56"])
def test_c1_resolution_ranks(name):
    G = load(name)
    t = time.perf_counter()
    R = res.normal_series_resolution(G, length=5)
    assert R.dims == [1, 5, 15, 35, 70, 126]
    assert time.perf_counter() - t < 5 * MIN


# -- 2 ------------------------------------------------------------------------------

@pytest.mark.criterion(2)
def test_c2_case_243_56():
    t = time.perf_counter()
    r = record("G_243_56")
    assert r.H4 == [3] * 7
    assert r.H4_p == [3] * 5
    assert math.prod(r.H4_nr) // math.prod(r.H4_p) == 3
    assert r.H3_nr == [3]
    assert r.B0 == []
    assert r.timing["total"] < 30 * MIN or time.perf_counter() - t < 30 * MIN


# -- 3 ------------------------------------------------------------------------------

@pytest.mark.criterion(3)
def test_c3_case_243_28():
    r = record("G_243_28")
    assert sorted(r.H4) == [3, 3, 9]
    assert r.H4_p == [3, 3, 3]
    assert r.H4_nr == r.H4_p
    assert r.H3_nr == []
    assert r.B0 == [3]
    assert r.timing["total"] < 30 * MIN
    # H4_p contains 3 times the order-9 generator, but not the generator itself
    R = rg("G_243_28")
    P = h4p(R)
    nine = [v for v in P.ambient.basis() if v.order() == 9][0]
    assert 3 * nine in P and nine not in P
    assert P == h4nr(R, P=P, pairs=choose_hi_pairs(R.group, subgroup_filter=True))


@pytest.mark.criterion(3)
@pytest.mark.parametrize("name", ["G_243_29", "G_243_30"])
def test_c3_cases_243_29_30(name):
    r = record(name)
    assert sorted(r.H4) == [3, 9]
    assert r.H3_nr == []
    assert r.B0 == [3]
    assert r.timing["total"] < 30 * MIN


# -- 4 ------------------------------------------------------------------------------

PHI7_H3S = {"G_243_56": [3, 3], "G_243_57": [3], "G_243_58": [3, 3, 3], "G_243_59": [3], "G_243_60": [3]}


@pytest.mark.criterion(4)
@pytest.mark.parametrize("name", sorted(PHI7_H3S))
def test_c4_phi7_family(name):
    r = record(name)
    assert r.H3_nr == [3]
    assert r.H3_s == PHI7_H3S[name]


@pytest.mark.criterion(4)
def test_c4_budget():
    assert sum(RECORDS[n].timing["total"] for n in PHI7_H3S) < 180 * MIN


# -- 5 ------------------------------------------------------------------------------

@pytest.mark.criterion(5)
def test_c5_case_3125_38():
    r = record("G_3125_38")
    assert r.H4 == [5] * 3
    assert r.H4_p == [5] * 2
    assert r.H4_nr == [5] * 3
    assert r.H3_nr == [5]
    assert r.timing["total"] < 120 * MIN


# -- 6 ------------------------------------------------------------------------------

def _oracle_groups():
    out = [("trivial", lambda: grp.cyclic_group(1))]
    out += [(n, (lambda n=n: load(n))) for n in small_group_names(16)]
    out += [
        ("S3_perm", lambda: grp.from_permutations([[1, 2, 0], [1, 0, 2]])),
        ("D4_perm", lambda: grp.from_permutations([[1, 2, 3, 0], [2, 1, 0, 3]])),
        ("Q8_perm", lambda: grp.from_permutations([[1, 2, 3, 0, 5, 6, 7, 4], [4, 7, 6, 5, 2, 1, 0, 3]])),
    ]
    return out


@pytest.mark.criterion(6)
@pytest.mark.parametrize("name,make", _oracle_groups(), ids=[n for n, _ in _oracle_groups()])
def test_c6_generic_resolution_matches_bar_oracle(name, make):
    G = make()
    R = res.generic_finite_resolution(G)
    got = [CohomologyData(R, n).torsion_coefficients for n in range(1, 5)]
    want = [oracle.bar_cohomology(G, n) for n in range(1, 5)]
    assert got == want


def test_permutation_models_are_the_intended_groups():
    s3, d4, q8 = (make() for n, make in _oracle_groups()[-3:])
    involutions = lambda G: sum(1 for g in G.elements if G.element_order(g) == 2)
    assert s3.order == 6 and not s3.is_abelian()
    assert d4.order == 8 and involutions(d4) == 5
    assert q8.order == 8 and involutions(q8) == 1 and not q8.is_abelian()


@pytest.mark.criterion(6)
def test_c6_snf_thousand_random_matrices():
    rng = random.Random(6)
    for _ in range(1000):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        check_snf([[rng.randint(-9, 9) for _ in range(n)] for _ in range(m)])


@pytest.mark.criterion(6)
def test_c6_lattice_ops_random():
    rng = random.Random(66)
    for _ in range(200):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        A = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(m)]
        for x in zmatrix.left_kernel(A):
            assert not any(zmatrix.vecmat(x, A))
        c = [rng.randint(-3, 3) for _ in range(m)]
        v = zmatrix.vecmat(c, A)
        y = zmatrix.solve_left(v, A)
        assert zmatrix.vecmat(y, A) == v
        B = zmatrix.lattice_basis(A, ncols=n)
        for row in A:
            assert not any(row) or zmatrix.solve_left(row, B) is not None


CORES_RES = [("G_6_1", 2), ("G_6_1", 3), ("G_8_3", 4), ("G_8_4", 4), ("G_8_3", 2),
             ("G_12_3", 4), ("S4", 8), ("S4", 6), ("G_27_3", 9), ("G_16_3", 8)]


@pytest.mark.criterion(6)
@pytest.mark.parametrize("name,order", CORES_RES)
def test_c6_cores_res_is_index(name, order):
    G = load(name)
    RG = res.resolution_for(G)
    H = [K for K in G.subgroup_classes() if K.order == order][0]
    RH = res.restrict_to_subgroup(RG, H)
    dG, dH = CohomologyData(RG, 4), CohomologyData(RH, 4)
    for v in dG.basis():
        assert maps.corestriction(maps.restriction(v, dG, dH), dH, dG) == (G.order // order) * v


@pytest.mark.criterion(6)
def test_c6_cup_products():
    R = res.resolution_for(grp.cyclic_group(2), strategy="norm")
    d2, d4 = CohomologyData(R, 2), CohomologyData(R, 4)
    x = d2.basis_class(0)
    assert maps.cup_product(R, x, x, d2, d2, d4) == d4.basis_class(0)
    assert maps.cup_product(R, x, d2.zero(), d2, d2, d4).is_zero()
    R = res.resolution_for(load("G_8_3"))
    d2, d4 = CohomologyData(R, 2), CohomologyData(R, 4)
    el = list(d2.elements())
    for u in el:
        for v in el:
            for w in el[:2]:
                lhs = maps.cup_product(R, u + v, w, d2, d2, d4)
                assert lhs == maps.cup_product(R, u, w, d2, d2, d4) + maps.cup_product(R, v, w, d2, d2, d4)


@pytest.mark.criterion(6)
def test_c6_budget():
    budget(6, 10 * MIN)


# -- 7 ------------------------------------------------------------------------------

GOLDEN = ["G_243_28", "G_243_29", "G_243_30", "G_243_56", "G_243_57", "G_243_58", "G_243_59", "G_243_60",
          "G_3125_38"]


@pytest.mark.criterion(7)
@pytest.mark.parametrize("name", GOLDEN)
def test_c7_resolution_identities(name):
    R = rg(name)
    assert R.check_d_squared()
    assert R.check_homotopy()


@pytest.mark.criterion(7)
def test_c7_subgroup_resolutions_used():
    """d^2 = 0 and the homotopy identity on every other resolution built so far."""
    seen = {id(rg(n)) for n in GOLDEN}
    count = 0
    for entries in res.default_cache._store.values():
        for _, R in entries:
            if id(R) in seen or R.group.order > 243:
                continue
            seen.add(id(R))
            assert R.check_d_squared()
            assert R.check_homotopy()
            count += 1
    assert count > 0


@pytest.mark.criterion(7)
def test_c7_containment_chain():
    for name in GOLDEN:
        record(name)
    assert RECORDS
    for r in RECORDS.values():
        assert r.containment_chain_holds(), r.group


@pytest.mark.criterion(7)
def test_c7_residue_additivity():
    R = rg("G_27_3")
    data = CohomologyData(R, 4)
    pairs = choose_hi_pairs(R.group, prune=False)
    rng = random.Random(27)
    M = R.trivial_boundary(4)

    def representative(v):
        # the class cocycle plus a random integer coboundary
        c = np.array([rng.randint(-2, 2) for _ in range(M.shape[1])], dtype=np.int64)
        return data.class_to_cocycle(v) + M @ c

    for _ in range(20):
        v = data.class_vector([rng.randrange(t) for t in data.torsion_coefficients])
        w = data.class_vector([rng.randrange(t) for t in data.torsion_coefficients])
        zv, zw = representative(v), representative(w)
        for pair in pairs:
            rm = residue_map(R, pair, data=data)
            assert rm.of_cocycle(zv + zw) == rm.of_cocycle(zv) + rm.of_cocycle(zw)
            assert rm.of_cocycle(zv) == rm(v)


@pytest.mark.criterion(7)
def test_c7_budget():
    budget(7, 10 * MIN)


# -- 8 ------------------------------------------------------------------------------

@pytest.mark.extended
@pytest.mark.criterion(8)
def test_c8_psl_2_8():
    G = load("PSL_2_8")
    R = res.generic_finite_resolution(G)
    data = CohomologyData(R, 4)
    assert data.torsion_coefficients == [126]
    P = h4p(R, h1_trivial=True, data=data)
    assert P.invariants() == [63]
    gen = data.basis_class(0)
    pairs = choose_hi_pairs(G)
    assert any(not residue_map(R, p, data=data)(gen).is_zero() for p in pairs)


@pytest.mark.extended
@pytest.mark.criterion(8)
def test_c8_a6():
    G = load("A6")
    R = res.generic_finite_resolution(G)
    data = CohomologyData(R, 4)
    assert data.torsion_coefficients == [60]
    assert h4p(R, data=data).invariants() == [30]
    # corestrictions of the negligible classes of the maximal subgroups generate H^4
    images = []
    for H in G.maximal_subgroup_classes():
        RH = res.restrict_to_subgroup(R, H)
        dH = CohomologyData(RH, 4)
        K, _ = H.as_group()
        N = h4n(res.default_cache.get(K))
        cm = maps.EquivariantChainMap(RH, N.ambient.resolution, None, top=4)
        for v in N.generators():
            images.append(maps.corestriction(v, N.ambient, data, chain_map=cm))
    assert SubgroupOfH4(data, images).is_everything()
