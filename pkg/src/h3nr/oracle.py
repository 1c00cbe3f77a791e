"""Brute-force reference values from the normalized bar complex.

H^n(G, Z) for n >= 1 is the torsion of the cokernel of the coboundary
delta: C^(n-1) -> C^n on normalized inhomogeneous cochains (functions on
tuples of non-identity elements).  The torsion is read off from the
p-local elementary divisors of delta, computed modulo p^K by streaming
its rows into an echelon basis with unit pivots; rows whose remainder is
divisible by p are set aside and reduced at the end.
"""

import numpy as np
import scipy.sparse as sp

BLOCK_ROWS = 512


def _modulus(p, order):
    """p^K with K two more than the p-adic valuation of the group order.

    A nonzero elementary divisor of a coboundary divides the exponent of
    the cohomology group it produces, hence |G|, so valuations >= K only
    come from zero divisors.
    """
    v = 0
    while order % p == 0:
        order //= p
        v += 1
    K = v + 2
    return K, p ** K


def _exact_dtype(inner, M):
    """Smallest float type whose products of inner-length rows stay exact."""
    if inner * M * M < 2 ** 24:
        return np.float32
    if inner * M * M < 2 ** 53:
        return np.float64
    raise OverflowError("modulus too large for exact float products")


def _matmul_mod(A, B, M):
    """(A @ B) mod M for float matrices holding integers in [0, M)."""
    return np.mod(A @ B, M)


def local_valuations(P, p, K, M):
    """Valuations of the p-local elementary divisors of a dense matrix mod p^K.

    Zero elementary divisors (valuation >= K) are omitted.
    """
    P = np.array(P, dtype=np.int64) % M
    out = []
    while P.size:
        nz = P != 0
        if not nz.any():
            break
        best, pos = K, None
        pk = 1
        for a in range(K):
            hit = np.argwhere(nz & (P % (pk * p) != 0))
            if len(hit):
                best, pos = a, hit[0]
                break
            pk *= p
        if pos is None:
            break
        r, c = int(pos[0]), int(pos[1])
        w = int(P[r, c]) // pk
        winv = pow(w, -1, M)
        col = (P[:, c] // pk) % M * winv % M
        col[r] = 0
        rows = np.nonzero(col)[0]
        if len(rows):
            P[rows] = (P[rows] - (col[rows, None] * P[r][None, :]) % M) % M
        out.append(best)
        P = np.delete(np.delete(P, r, axis=0), c, axis=1)
    return out


class LocalRowReducer:
    """Row space of an integer matrix over Z localized at p, modulo p^K.

    Rows with a unit entry become basis rows with a unit pivot; the basis
    is kept fully reduced (each basis row vanishes on the other pivot
    columns).  Remainders divisible by p are kept in a pending list, which
    is compressed from time to time and reduced at the end.  Entries are
    stored as float64 integers in [0, p^K) so that products use BLAS.
    """

    def __init__(self, ncols, p, order):
        self.ncols = ncols
        self.p = p
        self.K, self.M = _modulus(p, order)
        self.dtype = _exact_dtype(ncols, self.M)
        self.B = np.zeros((min(ncols, 64), ncols), dtype=self.dtype)
        self.nrows = 0
        self.row_of_col = -np.ones(ncols, dtype=np.int64)
        self.pivot_cols = -np.ones(ncols, dtype=np.int64)
        self.pending = []
        self._block_start = 0

    def _reduce(self, v):
        hit = np.nonzero(v)[0]
        hit = hit[self.row_of_col[hit] >= 0]
        if len(hit):
            v = np.mod(v - _matmul_mod(v[None, hit], self.B[self.row_of_col[hit]], self.M)[0], self.M)
        return v

    def add(self, v):
        self._insert(self._reduce(np.mod(np.asarray(v, dtype=self.dtype), self.M)))
        self._maybe_compact()

    def add_sparse_rows(self, cols, coefs):
        """Add the rows sum_j coefs[i, j] e_{cols[i, j]} as one block.

        The block is reduced against the current basis in one product.
        Rows are then finished one by one against the pivots created inside
        the block, and the older basis rows are brought back to reduced
        form in one product at the end.
        """
        M = self.M
        R, F = cols.shape
        V = sp.csr_matrix((coefs.ravel().astype(self.dtype), (np.repeat(np.arange(R), F), cols.ravel())),
                          shape=(R, self.ncols), dtype=self.dtype)
        V.sum_duplicates()
        dense = np.mod(V.toarray(), M)
        n0 = self.nrows
        if n0:
            # fresh rows are sparse, so the product with the basis is cheap
            V.data = np.mod(V.data, M)
            dense = np.mod(dense - np.mod(V[:, self.pivot_cols[:n0]] @ self.B[:n0], M), M)
        start = self._block_start = self.nrows
        has_unit = (dense % self.p != 0).any(axis=1)
        divisible = np.nonzero(dense.any(axis=1) & ~has_unit)[0]
        self.pending.extend(dense[divisible])
        for i in np.nonzero(has_unit)[0]:
            v = dense[i]
            if self.nrows > start:
                coeffs = v[self.pivot_cols[start:self.nrows]]
                used = np.nonzero(coeffs)[0]
                if len(used):
                    v = np.mod(v - coeffs[used] @ self.B[start + used], M)
            self._insert(v)
        if self.nrows > start and start:
            newcols = self.pivot_cols[start:self.nrows]
            old = self.B[:start]
            self.B[:start] = np.mod(old - _matmul_mod(old[:, newcols], self.B[start:self.nrows], M), M)
        self._block_start = 0
        self._maybe_compact()

    def _insert(self, v):
        M, p = self.M, self.p
        units = np.nonzero(v % p)[0]
        if len(units):
            c = int(units[0])
            v = np.mod(v * self.dtype(pow(int(v[c]), -1, M)), M)
            supp = np.nonzero(v)[0]
            lo = self._block_start
            if self.nrows > lo:
                colc = self.B[lo:self.nrows, c]
                rs = np.nonzero(colc)[0] + lo
                if len(rs):
                    sub = self.B[np.ix_(rs, supp)]
                    self.B[np.ix_(rs, supp)] = np.mod(sub - self.B[rs, c][:, None] * v[None, supp], M)
            if self.nrows == len(self.B):
                self.B = np.concatenate([self.B, np.zeros_like(self.B)], axis=0)
            self.B[self.nrows] = v
            self.row_of_col[c] = self.nrows
            self.pivot_cols[self.nrows] = c
            self.nrows += 1
        elif v.any():
            self.pending.append(v)

    def _maybe_compact(self):
        if len(self.pending) > 2 * max(64, self.ncols - self.nrows):
            self._compact()

    def _compact(self):
        free = np.nonzero(self.row_of_col < 0)[0]
        rows = np.array(self.pending)
        # pending rows already vanish on the pivots that existed when they
        # were stored, so only the few later pivot columns take part
        piv = self.pivot_cols[:self.nrows]
        coeffs = rows[:, piv]
        used = np.nonzero(coeffs.any(axis=0))[0]
        if len(used):
            rows = np.mod(rows - _matmul_mod(coeffs[:, used], self.B[used], self.M), self.M)
        basis = _local_echelon(rows[:, free].astype(np.int64), self.p, self.K, self.M)
        out = []
        for r in basis:
            v = np.zeros(self.ncols, dtype=self.dtype)
            v[free] = r
            out.append(v)
        self.pending = out

    def elementary_valuations(self):
        """Valuations of all nonzero p-local elementary divisors (0 for units)."""
        vals = [0] * self.nrows
        if self.pending:
            self._compact()
        if self.pending:
            free = np.nonzero(self.row_of_col < 0)[0]
            rows = np.array(self.pending).astype(np.int64)
            vals += local_valuations(rows[:, free], self.p, self.K, self.M)
        return vals


def _local_echelon(P, p, K, M):
    """A smaller set of rows with the same Z_(p) row span (mod p^K)."""
    P = np.array(P, dtype=np.int64) % M
    basis = []
    active = np.ones(len(P), dtype=bool)
    while True:
        sub = P[active]
        if not sub.size or not sub.any():
            break
        idx = np.nonzero(active)[0]
        pk, pos = 1, None
        for a in range(K):
            hit = np.argwhere((sub != 0) & (sub % (pk * p) != 0))
            if len(hit):
                pos = hit[0]
                break
            pk *= p
        if pos is None:
            break
        r, c = int(idx[pos[0]]), int(pos[1])
        w = int(P[r, c]) // pk
        winv = pow(w, -1, M)
        others = idx[idx != r]
        f = (P[others, c] // pk) % M * winv % M
        nzr = others[f != 0]
        f = f[f != 0]
        if len(nzr):
            P[nzr] = (P[nzr] - (f[:, None] * P[r][None, :]) % M) % M
        basis.append(P[r].copy())
        active[r] = False
    return basis


def _prime_factors(n):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _coboundary_rows(G, n):
    """Rows of delta: C^(n-1) -> C^n on normalized cochains, as (cols, coefs) batches.

    Tuples of non-identity elements are numbered in base |G|-1 with the
    first entry most significant; element e >= 1 has digit e - 1.
    """
    N = G.order
    b = N - 1
    mul = G.mul
    tuples = np.array(np.meshgrid(*[np.arange(1, N)] * n, indexing="ij")).reshape(n, -1).T
    weights_prev = b ** np.arange(n - 2, -1, -1) if n >= 2 else np.zeros(0, dtype=np.int64)

    def code(t):
        return ((t - 1) * weights_prev[None, :]).sum(axis=1) if t.shape[1] else np.zeros(len(t), dtype=np.int64)

    faces = []
    faces.append((code(tuples[:, 1:]), np.ones(len(tuples), dtype=np.int64)))
    for i in range(1, n):
        prod = mul[tuples[:, i - 1], tuples[:, i]]
        t = np.concatenate([tuples[:, :i - 1], prod[:, None], tuples[:, i + 1:]], axis=1)
        coef = np.where(prod == 0, 0, (-1) ** i)
        t = np.where(t == 0, 1, t)
        faces.append((code(t), coef))
    faces.append((code(tuples[:, :-1]), np.full(len(tuples), (-1) ** n, dtype=np.int64)))
    cols = np.stack([f[0] for f in faces], axis=1)
    coefs = np.stack([f[1] for f in faces], axis=1)
    return cols, coefs


def _invariant_factors(primary):
    """Invariant factors (divisibility order) from prime powers."""
    by_p = {}
    for q in primary:
        p = _prime_factors(q)[0]
        by_p.setdefault(p, []).append(q)
    k = max((len(v) for v in by_p.values()), default=0)
    out = [1] * k
    for p, qs in by_p.items():
        qs = sorted(qs)
        for i, q in enumerate(qs):
            out[k - len(qs) + i] *= q
    return out


def bar_cohomology(G, n):
    """Torsion coefficients of H^n(G, Z), n >= 1, from the normalized bar complex."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if n == 1 or G.order == 1:
        return []
    if G.mul[0].tolist() != list(range(G.order)):
        raise ValueError("the identity must be element 0")
    ncols = (G.order - 1) ** (n - 1)
    cols, coefs = _coboundary_rows(G, n)
    primary = []
    for p in _prime_factors(G.order):
        red = LocalRowReducer(ncols, p, G.order)
        for s in range(0, len(cols), BLOCK_ROWS):
            red.add_sparse_rows(cols[s:s + BLOCK_ROWS], coefs[s:s + BLOCK_ROWS])
        primary += [p ** a for a in red.elementary_valuations() if a > 0]
    return _invariant_factors(primary)


def selftest(verbose=False):
    """Compare the generic resolution with the bar complex on a few small groups."""
    from . import groups as grp
    from . import resolutions as res
    from .cohomology import CohomologyData
    cases = {
        "C2": grp.cyclic_group(2),
        "C2xC2": grp.abelian_group([2, 2]),
        "S3": grp.from_permutations([[1, 0, 2], [1, 2, 0]]),
        "C6": grp.cyclic_group(6),
    }
    ok = True
    for name, G in cases.items():
        R = res.generic_finite_resolution(G)
        for n in range(1, 5):
            a = CohomologyData(R, n).torsion_coefficients
            b = bar_cohomology(G, n)
            good = a == b
            ok &= good
            if verbose:
                print(f"{'PASS' if good else 'FAIL'} {name} H^{n}: resolution {a} bar {b}")
    return ok
