"""Exact integer linear algebra.

Matrices are lists of rows of Python integers, so entries never overflow.
Numpy integer arrays are accepted as input and converted on entry.

>>> smith_normal_form([[2, 4], [6, 8]]).normal
[[2, 0], [0, 4]]
>>> lattice_basis([(2, 0), (0, 2), (1, 1)])
[[1, 1], [0, 2]]
>>> block_sum([1, 2, 3, 4], 2)
[3, 7]
"""

from fractions import Fraction


def as_int_matrix(A, ncols=None):
    """Copy A into a list of lists of Python ints."""
    rows = [[int(x) for x in row] for row in A]
    if ncols is not None and rows and len(rows[0]) != ncols:
        raise ValueError("column count mismatch")
    return rows


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def matmul(A, B):
    """Product of two integer (or rational) matrices given as lists."""
    if not A:
        return []
    Bt = list(zip(*B)) if B else []
    if not Bt:
        return [[] for _ in A]
    return [[sum(a * b for a, b in zip(row, col) if a) for col in Bt] for row in A]


def vecmat(v, A):
    """Row vector times matrix."""
    if not A:
        return []
    out = [0] * len(A[0])
    for c, row in zip(v, A):
        if c:
            for j, a in enumerate(row):
                if a:
                    out[j] += c * a
    return out


def transpose(A):
    return [list(r) for r in zip(*A)]


class SmithDecomposition:
    """rowtrans * A * coltrans = normal, with the diagonal d1 | d2 | ..."""

    def __init__(self, normal, rowtrans, coltrans, rank):
        self.normal = normal
        self.rowtrans = rowtrans
        self.coltrans = coltrans
        self.rank = rank

    def diagonal(self):
        n = min(len(self.normal), len(self.normal[0]) if self.normal else 0)
        return [self.normal[i][i] for i in range(n)]

    def torsion(self):
        """Diagonal entries greater than one."""
        return [d for d in self.diagonal() if d > 1]

    def __repr__(self):
        return f"SmithDecomposition(diagonal={self.diagonal()}, rank={self.rank})"


def smith_normal_form(A, ncols=None):
    """Smith normal form with unimodular transforms.

    Pivots are chosen by smallest absolute value, ties broken by
    (row, column) index, so the transforms are reproducible.
    ncols is only needed when A has no rows.
    """
    A = as_int_matrix(A)
    m = len(A)
    n = len(A[0]) if m else (ncols or 0)
    P = identity(m)
    Q = identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        P[i], P[j] = P[j], P[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in Q:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):
        # row dst += c * row src
        rs, rd = A[src], A[dst]
        for k in range(t, n):
            if rs[k]:
                rd[k] += c * rs[k]
        ps, pd = P[src], P[dst]
        for k in range(m):
            if ps[k]:
                pd[k] += c * ps[k]

    def add_col(dst, src, c):
        for row in A:
            if row[src]:
                row[dst] += c * row[src]
        for row in Q:
            if row[src]:
                row[dst] += c * row[src]

    rank = 0
    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                a = row[j]
                if a and (best is None or abs(a) < best[0]):
                    best = (abs(a), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        if i != t:
            swap_rows(i, t)
        if j != t:
            swap_cols(j, t)
        while True:
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    add_row(i, t, -q)
                    if A[i][t]:
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    add_col(j, t, -q)
                    if A[t][j]:
                        done = False
            if not done:
                # move the smallest remaining entry of row/column t to the pivot
                best = (abs(A[t][t]), t, t)
                for i in range(t + 1, m):
                    if A[i][t] and abs(A[i][t]) < best[0]:
                        best = (abs(A[i][t]), i, t)
                for j in range(t + 1, n):
                    if A[t][j] and abs(A[t][j]) < best[0]:
                        best = (abs(A[t][j]), t, j)
                if best[1] != t:
                    swap_rows(best[1], t)
                if best[2] != t:
                    swap_cols(best[2], t)
                continue
            d = A[t][t]
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] % d:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            P[t] = [-x for x in P[t]]
        rank += 1
    return SmithDecomposition(A, P, Q, rank)


def hermite_normal_form(A, transform=False, ncols=None):
    """Row-style Hermite normal form.

    Returns H (and U with U * A = H when transform is set).  H is upper
    echelon with positive pivots and entries above each pivot reduced into
    [0, pivot).  Zero rows are kept at the bottom.
    """
    H = as_int_matrix(A)
    m = len(H)
    n = len(H[0]) if m else (ncols or 0)
    U = identity(m) if transform else None
    r = 0
    for c in range(n):
        if r >= m:
            break
        while True:
            piv = None
            for i in range(r, m):
                a = H[i][c]
                if a and (piv is None or abs(a) < abs(H[piv][c])):
                    piv = i
            if piv is None:
                break
            if piv != r:
                H[r], H[piv] = H[piv], H[r]
                if transform:
                    U[r], U[piv] = U[piv], U[r]
            clean = True
            p = H[r][c]
            hr = H[r]
            for i in range(r + 1, m):
                a = H[i][c]
                if a:
                    q = a // p
                    hi = H[i]
                    for k in range(c, n):
                        if hr[k]:
                            hi[k] -= q * hr[k]
                    if transform:
                        ur, ui = U[r], U[i]
                        for k in range(m):
                            if ur[k]:
                                ui[k] -= q * ur[k]
                    if hi[c]:
                        clean = False
            if clean:
                break
        if piv is None and H[r][c] == 0:
            continue
        if H[r][c] < 0:
            H[r] = [-x for x in H[r]]
            if transform:
                U[r] = [-x for x in U[r]]
        p = H[r][c]
        hr = H[r]
        for i in range(r):
            q = H[i][c] // p
            if q:
                hi = H[i]
                for k in range(c, n):
                    if hr[k]:
                        hi[k] -= q * hr[k]
                if transform:
                    ur, ui = U[r], U[i]
                    for k in range(m):
                        if ur[k]:
                            ui[k] -= q * ur[k]
        r += 1
    if transform:
        return H, U
    return H


def lattice_basis(vectors, ncols=None):
    """Canonical (Hermite) basis of the lattice spanned by the vectors."""
    vectors = as_int_matrix(vectors)
    if not vectors:
        return []
    H = hermite_normal_form(vectors, ncols=ncols)
    return [row for row in H if any(row)]


def left_kernel(A, nrows=None):
    """Lattice basis of {x : x * A = 0}.

    nrows is needed when A has no columns; then the kernel is everything.
    """
    A = as_int_matrix(A)
    m = len(A) if A else (nrows or 0)
    if m == 0:
        return []
    n = len(A[0]) if A else 0
    if n == 0:
        return identity(m)
    H, U = hermite_normal_form(A, transform=True)
    ker = [U[i] for i in range(m) if not any(H[i])]
    return lattice_basis(ker, ncols=m)


def _restrict(A, cols):
    if cols is None:
        return A, None
    cols = list(cols)
    return [A[i] for i in cols], cols


def solve_left(v, A, cols=None):
    """Integer x with x * A = v, or None when no integer solution exists.

    When cols is given, x is supported on those coordinates only, i.e. the
    system uses just the selected rows of A; the returned x still has one
    entry per row of A.
    """
    A = as_int_matrix(A)
    v = [int(x) for x in v]
    nrows = len(A)
    sub, cols = _restrict(A, cols)
    if not sub:
        return [0] * nrows if not any(v) else None
    H, U = hermite_normal_form(sub, transform=True)
    rest = list(v)
    coef = [0] * len(sub)
    for r, row in enumerate(H):
        c = next((k for k, a in enumerate(row) if a), None)
        if c is None:
            break
        q, rem = divmod(rest[c], row[c])
        if rem:
            return None
        if q:
            coef[r] = q
            for k in range(c, len(row)):
                if row[k]:
                    rest[k] -= q * row[k]
    if any(rest):
        return None
    xs = vecmat(coef, U)
    if cols is None:
        return xs
    x = [0] * nrows
    for i, c in zip(cols, xs):
        x[i] = c
    return x


class LeftSolver:
    """Repeated integer solves x * A = v against a fixed A.

    The Hermite form of A is computed once; solve() then costs one pass of
    back substitution per right-hand side.
    """

    def __init__(self, A):
        A = as_int_matrix(A)
        self.nrows = len(A)
        if A:
            self.H, self.U = hermite_normal_form(A, transform=True)
        else:
            self.H, self.U = [], []
        self.pivots = []
        for row in self.H:
            c = next((k for k, a in enumerate(row) if a), None)
            if c is None:
                break
            self.pivots.append(c)

    def solve(self, v):
        rest = [int(x) for x in v]
        coef = [0] * self.nrows
        for r, c in enumerate(self.pivots):
            row = self.H[r]
            q, rem = divmod(rest[c], row[c])
            if rem:
                return None
            if q:
                coef[r] = q
                for k in range(c, len(row)):
                    if row[k]:
                        rest[k] -= q * row[k]
        if any(rest):
            return None
        return vecmat(coef, self.U)


def solve_left_rational(v, A, cols=None):
    """Rational x with x * A = v (x supported on cols if given), or None."""
    A = as_int_matrix(A)
    nrows = len(A)
    sub, cols = _restrict(A, cols)
    if not sub:
        return [Fraction(0)] * nrows if not any(v) else None
    H, U = hermite_normal_form(sub, transform=True)
    rest = [Fraction(int(x)) for x in v]
    coef = [Fraction(0)] * len(sub)
    for r, row in enumerate(H):
        c = next((k for k, a in enumerate(row) if a), None)
        if c is None:
            break
        q = rest[c] / row[c]
        if q:
            coef[r] = q
            for k in range(c, len(row)):
                if row[k]:
                    rest[k] -= q * row[k]
    if any(rest):
        return None
    xs = vecmat(coef, U)
    if cols is None:
        return xs
    x = [Fraction(0)] * nrows
    for i, c in zip(cols, xs):
        x[i] = c
    return x


def block_sum(l, k):
    """Sums of consecutive blocks of k entries."""
    l = list(l)
    if k <= 0 or len(l) % k:
        raise ValueError("block size must divide the vector length")
    return [sum(l[i:i + k]) for i in range(0, len(l), k)]


def abelian_invariants_of_relations(rels, ngens):
    """Torsion invariants of Z^ngens modulo the row lattice of rels.

    Free summands are reported as 0.
    """
    if ngens == 0:
        return []
    if not rels:
        return [0] * ngens
    snf = smith_normal_form(rels)
    diag = snf.diagonal() + [0] * (ngens - min(len(rels), ngens))
    return [d for d in diag if d != 1]


def quotient_invariants(basis, torsion):
    """Invariants of L / (torsion lattice) where L has the given full-rank basis.

    The torsion lattice is spanned by the rows of diag(torsion) and must lie
    inside L.  Used for subgroups of a finite abelian group in coordinates.
    """
    k = len(torsion)
    if k == 0:
        return []
    rels = []
    for i, t in enumerate(torsion):
        target = [0] * k
        target[i] = t
        x = solve_left(target, basis)
        if x is None:
            raise ValueError("torsion lattice not contained in the basis lattice")
        rels.append(x)
    return [d for d in abelian_invariants_of_relations(rels, len(basis)) if d != 0]
