import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from h3nr import zmatrix

matrices = st.integers(1, 6).flatmap(
    lambda m: st.integers(1, 6).flatmap(
        lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=m, max_size=m)))


def det(M):
    """Fraction-free (Bareiss) determinant."""
    M = [list(r) for r in M]
    n = len(M)
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def determinantal_diagonal(A):
    """Smith diagonal from gcds of k-minors: s_k = d_k / d_(k-1)."""
    m, n = len(A), len(A[0])
    out, dprev = [], 1
    for k in range(1, min(m, n) + 1):
        d = 0
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                d = math.gcd(d, det([[A[i][j] for j in cols] for i in rows]))
                if d == 1:
                    break
            if d == 1:
                break
        if d == 0:
            out += [0] * (min(m, n) - k + 1)
            break
        out.append(d // dprev)
        dprev = d
    return out


def unimodular(M):
    return abs(det(M)) == 1


def check_snf(A):
    snf = zmatrix.smith_normal_form(A)
    assert zmatrix.matmul(zmatrix.matmul(snf.rowtrans, A), snf.coltrans) == snf.normal
    assert unimodular(snf.rowtrans) and unimodular(snf.coltrans)
    diag = snf.diagonal()
    for i, row in enumerate(snf.normal):
        for j, x in enumerate(row):
            assert i == j or x == 0
    nz = [d for d in diag if d]
    assert all(d > 0 for d in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert diag == nz + [0] * (len(diag) - len(nz))
    assert diag == determinantal_diagonal(A)


def test_snf_thousand_random_matrices_against_minors():
    rng = random.Random(20261014)
    for _ in range(1000):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        A = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(m)]
        check_snf(A)


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_snf_property(A):
    check_snf(A)


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_hermite_form(A):
    H, U = zmatrix.hermite_normal_form(A, transform=True)
    assert zmatrix.matmul(U, A) == H
    assert unimodular(U)
    last = -1
    for row in H:
        piv = next((k for k, a in enumerate(row) if a), None)
        if piv is None:
            assert not any(row)
            last = len(row)
            continue
        assert piv > last and row[piv] > 0
        last = piv
    # entries above a pivot are reduced
    for r, row in enumerate(H):
        piv = next((k for k, a in enumerate(row) if a), None)
        if piv is not None:
            for above in H[:r]:
                assert 0 <= above[piv] < row[piv]


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_left_kernel_and_solve(A):
    K = zmatrix.left_kernel(A)
    for x in K:
        assert not any(zmatrix.vecmat(x, A))
    # kernel rank is rows minus rank
    rank = sum(1 for d in zmatrix.smith_normal_form(A).diagonal() if d)
    assert len(K) == len(A) - rank
    rng = random.Random(len(A) * 7 + len(A[0]))
    x = [rng.randint(-3, 3) for _ in A]
    v = zmatrix.vecmat(x, A)
    y = zmatrix.solve_left(v, A)
    assert y is not None and zmatrix.vecmat(y, A) == v
    assert zmatrix.LeftSolver(A).solve(v) is not None


def test_solve_left_detects_non_integral():
    A = [[2, 0], [0, 3]]
    assert zmatrix.solve_left([1, 0], A) is None
    assert zmatrix.solve_left([4, 3], A) == [2, 1]
    x = zmatrix.solve_left_rational([1, 0], A)
    assert x[0] * 2 == 1


def test_abelian_invariants_of_relations():
    assert zmatrix.abelian_invariants_of_relations([[2, 0], [0, 3]], 2) == [6]
    assert zmatrix.abelian_invariants_of_relations([[4, 0]], 2) == [4, 0]
    assert zmatrix.abelian_invariants_of_relations([], 3) == [0, 0, 0]


def test_block_sum():
    assert zmatrix.block_sum([1, 2, 3, 4, 5, 6], 2) == [3, 7, 11]


def test_small_smith_examples():
    assert zmatrix.smith_normal_form([[2, 0], [0, 3]]).diagonal() == [1, 6]
    assert zmatrix.smith_normal_form([[2, 4], [6, 8]]).diagonal() == [2, 4]
    z = zmatrix.smith_normal_form([[0, 0], [0, 0]])
    assert z.diagonal() == [0, 0] and z.rank == 0


def test_lattice_basis_examples():
    assert zmatrix.lattice_basis([]) == []
    B = zmatrix.lattice_basis([[2, 0], [0, 2], [1, 1]])
    assert sorted(map(tuple, B)) == [(0, 2), (1, 1)]


def test_solve_examples():
    assert zmatrix.solve_left([0, 0], [[2, 0], [0, 2]]) == [0, 0]
    assert zmatrix.solve_left([4, 6], [[2, 0], [0, 2]]) == [2, 3]
    assert zmatrix.solve_left([1], [[2]]) is None


def test_block_sum_examples():
    assert zmatrix.block_sum([1, 2, 3, 4], 2) == [3, 7]
    assert zmatrix.block_sum([5, -5, 0, 0, 2, 2], 3) == [0, 4]
    assert zmatrix.block_sum([4, 5], 1) == [4, 5]
    with pytest.raises(ValueError):
        zmatrix.block_sum([1, 2, 3], 2)
