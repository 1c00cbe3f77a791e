"""Free resolutions of Z over integral group rings.

A free ZG-module of rank r is stored densely as an integer vector of length
r*|G|: coordinate gen*|G| + g is the coefficient of g*e_gen.  Batches of
vectors are 2-d arrays with one column per vector.

Boundaries are kept as term arrays (src, coef, gen, elt) meaning that
d(e_src) contains coef * elt * e_gen.  Generator indices are 0-based.

Every resolution can lift cycles: lift(n, Z) returns Y in degree n+1 with
d(Y) = Z for Z a batch of cycles in degree n (in degree 0 a cycle is a
vector of augmentation zero).  The contracting homotopy is derived from
the lifter.
"""

import numpy as np
import scipy.sparse as sp

from . import groups as grp
from . import zmatrix

DEFAULT_LENGTH = 5


class Terms:
    """All boundary terms of one degree, sorted by source generator."""

    def __init__(self, src, coef, gen, elt):
        order = np.lexsort((elt, gen, src))
        self.src = np.asarray(src, dtype=np.int64)[order]
        self.coef = np.asarray(coef, dtype=np.int64)[order]
        self.gen = np.asarray(gen, dtype=np.int64)[order]
        self.elt = np.asarray(elt, dtype=np.int64)[order]

    def __len__(self):
        return len(self.src)

    @classmethod
    def from_words(cls, words):
        src, coef, gen, elt = [], [], [], []
        for i, w in enumerate(words):
            for c, j, a in w:
                src.append(i)
                coef.append(c)
                gen.append(j)
                elt.append(a)
        return cls(src, coef, gen, elt)

    @classmethod
    def from_dense(cls, X, order):
        """Terms from a dense batch: column i is the boundary of generator i."""
        rows, cols = np.nonzero(X)
        return cls(cols, X[rows, cols], rows // order, rows % order)

    def word(self, i):
        lo, hi = np.searchsorted(self.src, [i, i + 1])
        return [(int(c), int(j), int(a)) for c, j, a in
                zip(self.coef[lo:hi], self.gen[lo:hi], self.elt[lo:hi])]


def left_action_index(group, elts, dim):
    """Index arrays for left multiplication on dense vectors.

    Returns an array of shape (len(elts), dim*|G|) whose row for b lists,
    for each output coordinate (gen, h), the input coordinate (gen, b^-1 h).
    """
    n = group.order
    inv = group.inv[np.asarray(elts)]
    base = (np.arange(dim) * n)[None, :, None]
    return (base + group.mul[inv][:, None, :]).reshape(len(inv), dim * n)


class FreeResolution:
    """Base class: boundaries as term arrays plus a cycle lifter."""

    strategy = "abstract"

    def __init__(self, group, length):
        self.group = group
        self.length = length
        self.dims = []
        self._terms = {}
        self._csr = {}
        self._csc = {}

    def __repr__(self):
        return f"{type(self).__name__}(order={self.group.order}, dims={self.dims})"

    def dimension(self, n):
        return self.dims[n]

    def terms(self, n):
        if not 1 <= n <= self.length:
            raise ValueError("degree out of range")
        return self._terms[n]

    def boundary(self, n, i):
        """The boundary word of generator i in degree n as (coef, gen, elt) triples."""
        return self.terms(n).word(i)

    def trivial_boundary(self, n):
        """Integer matrix M with M[i][j] = sum of coefficients of gen j in d(e_i)."""
        t = self.terms(n)
        M = np.zeros((self.dims[n], self.dims[n - 1]), dtype=np.int64)
        np.add.at(M, (t.src, t.gen), t.coef)
        return M

    def _sparse(self, n):
        t = self.terms(n)
        N = self.group.order
        rm = self.group.right_mul
        rows = (t.gen[:, None] * N + rm[t.elt]).ravel()
        cols = (t.src[:, None] * N + np.arange(N)[None, :]).ravel()
        vals = np.repeat(t.coef, N)
        shape = (self.dims[n - 1] * N, self.dims[n] * N)
        return sp.coo_matrix((vals, (rows, cols)), shape=shape)

    def boundary_csr(self, n):
        if n not in self._csr:
            self._csr[n] = self._sparse(n).tocsr()
        return self._csr[n]

    def boundary_csc(self, n):
        if n not in self._csc:
            self._csc[n] = self._sparse(n).tocsc()
        return self._csc[n]

    def apply_boundary(self, n, X):
        """d_n applied to a dense batch in degree n."""
        X = np.asarray(X, dtype=np.int64)
        if n == 0:
            return np.zeros((0, X.shape[1]), dtype=np.int64)
        return np.asarray(self.boundary_csr(n) @ X)

    def augmentation(self, X):
        return np.asarray(X).sum(axis=0)

    def lift(self, n, Z):
        raise NotImplementedError

    def homotopy(self, n, X):
        """Contracting homotopy h_n on a dense batch in degree n (n < length)."""
        X = np.asarray(X, dtype=np.int64)
        if X.ndim == 1:
            return self.homotopy(n, X[:, None])[:, 0]
        if n == 0:
            Z = X.copy()
            Z[0] -= X.sum(axis=0)
            return self.lift(0, Z)
        dX = self.apply_boundary(n, X)
        return self.lift(n, X - self.homotopy(n - 1, dX))

    def homotopy_word(self, n, word):
        """Homotopy on a word (list of (coef, gen, elt)) returning a word."""
        N = self.group.order
        x = np.zeros(self.dims[n] * N, dtype=np.int64)
        for c, j, a in word:
            x[j * N + a] += c
        y = self.homotopy(n, x)
        return [(int(y[r]), int(r // N), int(r % N)) for r in np.nonzero(y)[0]]

    def unit_vectors(self, n):
        """Dense batch of the free generators of degree n (one column each)."""
        N = self.group.order
        X = np.zeros((self.dims[n] * N, self.dims[n]), dtype=np.int64)
        X[np.arange(self.dims[n]) * N, np.arange(self.dims[n])] = 1
        return X

    def check_d_squared(self):
        """True when d_{n-1} d_n = 0 on every generator up to the length."""
        for n in range(2, self.length + 1):
            if self.apply_boundary(n - 1, self.apply_boundary(n, self.unit_vectors(n))).any():
                return False
        return True

    def check_homotopy(self, top=None):
        """Check d h + h d = 1 - eta*eps on all generators of degrees < top."""
        top = self.length if top is None else top
        N = self.group.order
        for n in range(top):
            X = self.unit_vectors(n)
            if n == 0:
                # d h(x) = x - eta eps(x) on every basis element of degree 0
                X = np.eye(self.dims[0] * N, dtype=np.int64)
                lhs = self.apply_boundary(1, self.homotopy(0, X))
                rhs = X.copy()
                rhs[0] -= 1
            else:
                lhs = self.apply_boundary(n + 1, self.homotopy(n, X)) + self.homotopy(n - 1, self.apply_boundary(n, X))
                rhs = X
            if not (lhs == rhs).all():
                return False
        return True


class NormResolution(FreeResolution):
    """The periodic resolution of a cyclic group C_m = <g>, element k = g^k."""

    strategy = "norm"

    def __init__(self, m, length=DEFAULT_LENGTH, group=None):
        group = grp.cyclic_group(m) if group is None else group
        super().__init__(group, length)
        self.m = m
        self.dims = [1] * (length + 1)
        for n in range(1, length + 1):
            if n % 2:
                w = [(1, 0, 1 % m), (-1, 0, 0)] if m > 1 else []
            else:
                w = [(1, 0, k) for k in range(m)]
            self._terms[n] = Terms.from_words([w])
        self._h = {}

    def _hmat(self, n):
        if n not in self._h:
            m = self.m
            H = np.zeros((m, m), dtype=np.int64)
            if n % 2 == 0:
                # g^k e -> (1 + g + ... + g^(k-1)) e'
                H[np.tril_indices(m, -1)[1], np.tril_indices(m, -1)[0]] = 1
            else:
                H[0, m - 1] = 1
            self._h[n] = H
        return self._h[n]

    def lift(self, n, Z):
        if n >= self.length:
            raise ValueError("degree out of range")
        Z = np.asarray(Z, dtype=np.int64)
        return self._hmat(n) @ Z

    def homotopy(self, n, X):
        X = np.asarray(X, dtype=np.int64)
        if X.ndim == 1:
            return self.homotopy(n, X[:, None])[:, 0]
        if n >= self.length:
            raise ValueError("degree out of range")
        return self._hmat(n) @ X


def norm_resolution_cyclic(I, length=DEFAULT_LENGTH, generator=None):
    """Norm resolution of a cyclic group.

    I may be an integer m (the standard C_m) or a cyclic FiniteGroup, in
    which case the resolution is relabelled onto I via k -> generator^k.
    """
    if isinstance(I, int):
        return NormResolution(I, length)
    m = I.order
    if generator is None:
        cands = np.nonzero(I.element_orders == m)[0]
        if len(cands) == 0:
            raise ValueError("group is not cyclic")
        generator = int(cands[0])
    elif I.element_order(generator) != m:
        raise ValueError("element does not generate the group")
    powers = [0]
    for _ in range(m - 1):
        powers.append(int(I.mul[powers[-1], generator]))
    return RelabeledResolution(NormResolution(m, length), I, np.asarray(powers))


class RelabeledResolution(FreeResolution):
    """A resolution transported along a group isomorphism (element relabelling)."""

    def __init__(self, R, group, iso):
        super().__init__(group, R.length)
        self.base = R
        self.iso = np.asarray(iso, dtype=np.int64)
        self.strategy = R.strategy
        self.dims = list(R.dims)
        inv_iso = np.empty_like(self.iso)
        inv_iso[self.iso] = np.arange(len(self.iso))
        self.inv_iso = inv_iso
        for n in range(1, R.length + 1):
            t = R.terms(n)
            self._terms[n] = Terms(t.src, t.coef, t.gen, self.iso[t.elt])

    def _perm(self, n):
        # new coordinate gen*N + iso[a]  <-  old coordinate gen*N + a
        N = self.group.order
        return (np.arange(self.dims[n])[:, None] * N + self.iso[None, :]).ravel()

    def lift(self, n, Z):
        Z = np.asarray(Z, dtype=np.int64)
        old = Z[self._perm(n)]
        Y = self.base.lift(n, old)
        out = np.zeros_like(Y)
        out[self._perm(n + 1)] = Y
        return out


class ExtensionData:
    """G as an extension of a normal subgroup N by Q = G/N.

    proj: G -> Q, section: Q -> G with section[0] = 0, iota: N -> G where N
    is a FiniteGroup on its own indices.  Every g factors uniquely as
    section[proj[g]] * iota[n].
    """

    def __init__(self, G, Q, N, proj, section, iota):
        self.G, self.Q, self.N = G, Q, N
        self.proj = np.asarray(proj, dtype=np.int64)
        self.section = np.asarray(section, dtype=np.int64)
        self.iota = np.asarray(iota, dtype=np.int64)
        if self.section[0] != 0:
            raise ValueError("section must send 1 to 1")
        if not (self.proj[self.section] == np.arange(Q.order)).all():
            raise ValueError("section is not a section of the projection")
        if Q.order * N.order != G.order:
            raise ValueError("orders do not match")
        local = -np.ones(G.order, dtype=np.int64)
        local[self.iota] = np.arange(N.order)
        t = self.section[self.proj]
        nn = local[G.mul[G.inv[t], np.arange(G.order)]]
        if (nn < 0).any():
            raise ValueError("kernel of the projection is not the image of N")
        self.npart = nn
        # element with coordinates (q, n)
        self.compose = G.mul[self.section[:, None], self.iota[None, :]]

    def cocycle(self, a, b):
        """n with s(a) s(b) = s(ab) iota(n), as an index into N."""
        return int(self.npart[self.G.mul[self.section[a], self.section[b]]])

    def action(self, q, n):
        """s(q)^-1 iota(n) s(q) as an index into N."""
        G, s = self.G, self.section[q]
        return int(self.npart[G.mul[G.mul[G.inv[s], self.iota[n]], s]])

    def check(self):
        """Exhaustive consistency checks of the extension data."""
        G, Q = self.G, self.Q
        if not (self.proj[G.mul] == Q.mul[self.proj[:, None], self.proj[None, :]]).all():
            return False
        if not (self.proj[self.iota] == 0).all():
            return False
        # cocycle identity n(ab,c) * (n(a,b) acted on by c) = n(a,bc) * n(b,c)
        nQ, Nm = Q.order, self.N.mul
        a = np.arange(nQ)[:, None]
        b = np.arange(nQ)[None, :]
        s, mul, inv = self.section, G.mul, G.inv
        nab = self.npart[mul[s[a], s[b]]]
        ab = Q.mul[a, b]
        for c in range(nQ):
            sc = s[c]
            act = self.npart[mul[mul[inv[sc], self.iota[nab]], sc]]
            lhs = Nm[self.npart[mul[s[ab], sc]], act]
            bc = Q.mul[b, c]
            rhs = Nm[self.npart[mul[s[a], s[bc]]], self.npart[mul[s[b], sc]]]
            if not (lhs == rhs).all():
                return False
        return True


def direct_product_extension(A, B, G=None):
    """Extension data for A x B (index a*|B| + b) with N = B and Q = A."""
    if G is None:
        G = grp.direct_product(A, B)
    nb = B.order
    proj = np.arange(A.order * nb) // nb
    return ExtensionData(G, A, B, proj, np.arange(A.order) * nb, np.arange(nb))


class LazyProductGroup:
    """Order-only stand-in for A x B; the table is built on first use."""

    def __init__(self, A, B):
        self.A, self.B = A, B
        self.order = A.order * B.order
        self._G = None

    def materialize(self):
        if self._G is None:
            self._G = grp.direct_product(self.A, self.B)
        return self._G

    def __getattr__(self, name):
        if name in ("mul", "inv", "right_mul", "element_orders", "generators"):
            return getattr(self.materialize(), name)
        raise AttributeError(name)


class TwistedTensorProduct(FreeResolution):
    """Resolution of G from resolutions of N (normal) and Q = G/N.

    Generators of degree n are e_p (x) f_q with p + q = n, ordered by p
    descending, then Q-generator major, N-generator minor.  With
    split=True the group is a direct product and the boundary is the plain
    tensor product differential d(a (x) b) = da (x) b + (-1)^p a (x) db.
    Otherwise the differential is d_0 + d_1 + ... with d_0 = (-1)^p (1 (x) d)
    and the corrections d_k found from the contracting homotopy of RN.
    """

    strategy = "twisted"

    def __init__(self, RQ, RN, ext=None, length=None, split=False, group=None):
        length = min(RQ.length, RN.length) if length is None else length
        if split:
            group = LazyProductGroup(RQ.group, RN.group) if group is None else group
        else:
            group = ext.G
        super().__init__(group, length)
        self.RQ, self.RN = RQ, RN
        self._ext = ext
        self.split = split
        self.strategy = "tensor" if split else "twisted"
        a, b = RQ.dims, RN.dims
        self.offsets = []
        for n in range(length + 1):
            off, o = {}, 0
            for p in range(n, -1, -1):
                off[p] = o
                o += a[p] * b[n - p]
            self.offsets.append(off)
            self.dims.append(o)
        self._hv = {}
        self._eps = None
        if split:
            for n in range(1, length + 1):
                self._terms[n] = self._split_terms(n)
        else:
            for n in range(1, length + 1):
                self._terms[n] = self._perturbed_terms(n)

    @property
    def ext(self):
        if self._ext is None:
            G = self.group.materialize() if isinstance(self.group, LazyProductGroup) else self.group
            self._ext = direct_product_extension(self.RQ.group, self.RN.group, G)
        return self._ext

    def gen_index(self, n, p, i, j):
        return self.offsets[n][p] + i * self.RN.dims[n - p] + j

    def block(self, n, p):
        """Generator range of block (p, n-p) in degree n."""
        lo = self.offsets[n][p]
        return lo, lo + self.RQ.dims[p] * self.RN.dims[n - p]

    def block_of(self, n):
        """Array giving p for every generator of degree n."""
        out = np.empty(self.dims[n], dtype=np.int64)
        for p in range(n, -1, -1):
            lo, hi = self.block(n, p)
            out[lo:hi] = p
        return out

    # -- boundaries ---------------------------------------------------------

    def _split_terms(self, n):
        RQ, RN = self.RQ, self.RN
        nb = RN.group.order
        src, coef, gen, elt = [], [], [], []
        for p in range(n, -1, -1):
            q = n - p
            bq = RN.dims[q]
            if p >= 1:
                t = RQ.terms(p)
                # d e_i (x) f_j for every j
                for j in range(bq):
                    src.append(self.offsets[n][p] + t.src * bq + j)
                    coef.append(t.coef)
                    gen.append(self.offsets[n - 1][p - 1] + t.gen * bq + j)
                    elt.append(t.elt * nb)
            if q >= 1:
                t = RN.terms(q)
                sign = -1 if p % 2 else 1
                for i in range(RQ.dims[p]):
                    src.append(self.offsets[n][p] + i * bq + t.src)
                    coef.append(sign * t.coef)
                    gen.append(self.offsets[n - 1][p] + i * RN.dims[q - 1] + t.gen)
                    elt.append(t.elt)
        return Terms(np.concatenate(src), np.concatenate(coef), np.concatenate(gen), np.concatenate(elt))

    def _perturbed_terms(self, n):
        RQ, RN, ext = self.RQ, self.RN, self.ext
        NG = self.group.order
        pieces = []
        for p in range(n, -1, -1):
            q = n - p
            ap, bq = RQ.dims[p], RN.dims[q]
            X = np.zeros((self.dims[n - 1] * NG, ap * bq), dtype=np.int64)
            if q >= 1:
                t = RN.terms(q)
                sign = -1 if p % 2 else 1
                bq1 = RN.dims[q - 1]
                for i in range(ap):
                    rows = (self.offsets[n - 1][p] + i * bq1 + t.gen) * NG + ext.iota[t.elt]
                    np.add.at(X, (rows, i * bq + t.src), sign * t.coef)
            else:
                t = RQ.terms(p)
                rows = self.offsets[n - 1][p - 1] * NG + t.gen * NG + ext.section[t.elt]
                np.add.at(X, (rows, t.src), t.coef)
            for k in range(1, p + 1):
                if q == 0 and k == 1:
                    continue
                if n - 2 < 0:
                    break
                src_q = q + k - 2
                lo, hi = self.block(n - 2, p - k)
                R = np.asarray(self.boundary_csr(n - 1)[lo * NG:hi * NG] @ X)
                if not R.any():
                    continue
                corr = self.apply_hv(p - k, src_q, R)
                lo2, hi2 = self.block(n - 1, p - k)
                X[lo2 * NG:hi2 * NG] -= corr
            rows, cols = np.nonzero(X)
            pieces.append((cols + self.offsets[n][p], X[rows, cols], rows // NG, rows % NG))
        return Terms(*[np.concatenate(z) for z in zip(*pieces)])

    # -- homotopy pieces ----------------------------------------------------

    def _hv_matrix(self, q):
        """Sparse 1 (x) h^N from row q to row q+1, as a map on b_q*|G| coordinates."""
        if q not in self._hv:
            RN, ext = self.RN, self.ext
            nN, NG, nQ = RN.group.order, self.group.order, self.RQ.group.order
            hN = RN.homotopy(q, np.eye(RN.dims[q] * nN, dtype=np.int64))
            r, c = np.nonzero(hN)
            v = hN[r, c]
            jr, nr = r // nN, r % nN
            jc, nc = c // nN, c % nN
            t = np.arange(nQ)
            rows = (jr[:, None] * NG + ext.compose[t[None, :], nr[:, None]]).ravel()
            cols = (jc[:, None] * NG + ext.compose[t[None, :], nc[:, None]]).ravel()
            vals = np.repeat(v, nQ)
            shape = (RN.dims[q + 1] * NG, RN.dims[q] * NG)
            self._hv[q] = sp.csr_matrix((vals, (rows, cols)), shape=shape)
        return self._hv[q]

    def apply_hv(self, p, q, V):
        """Vertical homotopy (-1)^p (1 (x) h^N) on block (p, q) -> (p, q+1)."""
        ap = self.RQ.dims[p]
        H = self._hv_matrix(q)
        B = V.shape[1]
        rows_in = H.shape[1]
        V3 = V.reshape(ap, rows_in, B).transpose(1, 0, 2).reshape(rows_in, ap * B)
        out = np.asarray(H @ V3)
        out = out.reshape(H.shape[0], ap, B).transpose(1, 0, 2).reshape(ap * H.shape[0], B)
        return -out if p % 2 else out

    def _eps_matrix(self):
        if self._eps is None:
            NG = self.group.order
            self._eps = sp.csr_matrix((np.ones(NG, dtype=np.int64), (self.ext.proj, np.arange(NG))),
                                      shape=(self.RQ.group.order, NG))
        return self._eps

    def _eps_v(self, p, V):
        ap, NG = self.RQ.dims[p], self.group.order
        B = V.shape[1]
        V3 = V.reshape(ap, NG, B).transpose(1, 0, 2).reshape(NG, ap * B)
        W = np.asarray(self._eps_matrix() @ V3)
        nQ = self.RQ.group.order
        return W.reshape(nQ, ap, B).transpose(1, 0, 2).reshape(ap * nQ, B)

    def _section_lift(self, p, W):
        ap, NG, nQ = self.RQ.dims[p], self.group.order, self.RQ.group.order
        B = W.shape[1]
        Y = np.zeros((ap, NG, B), dtype=np.int64)
        Y[:, self.ext.section, :] = W.reshape(ap, nQ, B)
        return Y.reshape(ap * NG, B)

    def _block_cols(self, n, p):
        """Column block of d_n for the generators of block (p, n-p)."""
        key = (n, p)
        cache = self.__dict__.setdefault("_colblocks", {})
        if key not in cache:
            NG = self.group.order
            t = self.terms(n)
            lo, hi = self.block(n, p)
            m = (t.src >= lo) & (t.src < hi)
            rm = self.group.right_mul
            rows = (t.gen[m][:, None] * NG + rm[t.elt[m]]).ravel()
            cols = ((t.src[m] - lo)[:, None] * NG + np.arange(NG)[None, :]).ravel()
            vals = np.repeat(t.coef[m], NG)
            cache[key] = sp.csr_matrix((vals, (rows, cols)), shape=(self.dims[n - 1] * NG, (hi - lo) * NG))
        return cache[key]

    def lift(self, n, Z):
        if n >= self.length:
            raise ValueError("degree out of range")
        Z = np.array(Z, dtype=np.int64, copy=True)
        if Z.ndim == 1:
            return self.lift(n, Z[:, None])[:, 0]
        NG = self.group.order
        B = Z.shape[1]
        Y = np.zeros((self.dims[n + 1] * NG, B), dtype=np.int64)
        for p in range(n, -1, -1):
            q = n - p
            lo, hi = self.block(n, p)
            c = Z[lo * NG:hi * NG]
            if not c.any():
                continue
            if q == 0:
                w = self._eps_v(p, c)
                w2 = self.RQ.lift(p, w)
                yt = self._section_lift(p + 1, w2)
                l1, h1 = self.block(n + 1, p + 1)
                Y[l1 * NG:h1 * NG] += yt
                Z -= np.asarray(self._block_cols(n + 1, p + 1) @ yt)
                c = Z[lo * NG:hi * NG]
            y = self.apply_hv(p, q, c)
            l1, h1 = self.block(n + 1, p)
            Y[l1 * NG:h1 * NG] += y
            Z -= np.asarray(self._block_cols(n + 1, p) @ y)
        if Z.any():
            raise RuntimeError("cycle lifting failed: input was not a cycle")
        return Y


def tensor_product_resolution(RA, RB, length=None):
    """Resolution of A x B from resolutions of A and B (element index a*|B| + b)."""
    return TwistedTensorProduct(RA, RB, length=length, split=True)


def extension_resolution(RN, RQ, ext, length=None):
    """Twisted tensor product resolution of an extension of N by Q."""
    return TwistedTensorProduct(RQ, RN, ext=ext, length=length, split=False)


def abelian_resolution(invariants, length=DEFAULT_LENGTH):
    """Tensor product of norm resolutions over groups.abelian_group(invariants)."""
    inv = [m for m in invariants if m > 1]
    if not inv:
        return NormResolution(1, length)
    R = NormResolution(inv[0], length)
    for m in inv[1:]:
        R = tensor_product_resolution(R, NormResolution(m, length), length)
        R.group = R.group.materialize()
        R._ext = None
    return R


def resolution_of_abelian_group(A, elements=None, length=DEFAULT_LENGTH):
    """Resolution of an abelian FiniteGroup, transported from the standard model.

    Returns (R, iso) with R over the standard abelian_group and iso the
    element map from it into A (or into the ambient group when elements
    describes an abelian subgroup).
    """
    invariants, gens = grp.abelian_basis(A, elements)
    R = abelian_resolution(invariants, length)
    std = R.group
    # iso(a) = prod gens_k ^ a_k in mixed radix order (first factor major)
    iso = np.zeros(std.order, dtype=np.int64)
    idx = 0
    sizes = []
    s = 1
    for m in reversed(invariants):
        sizes.append(s)
        s *= m
    sizes = list(reversed(sizes))
    for x in range(std.order):
        g, rem = 0, x
        for m, sz, y in zip(invariants, sizes, gens):
            e, rem = divmod(rem, sz)
            g = A.mul[g, A.power(y, e)]
        iso[x] = g
        idx += 1
    return R, iso


def normal_series_resolution(G, series=None, length=DEFAULT_LENGTH):
    """Resolution along a normal series with abelian factors.

    series is a list of Subgroups G = N_0 > N_1 > ... > N_c = 1 each normal
    in G (default: the lower central series).  The top factor is resolved as
    a tensor product of norm resolutions, then every further factor is
    added as a twisted tensor product.
    """
    if series is None:
        series = G.lower_central_series()
        if series[-1].order != 1:
            raise ValueError("group is not nilpotent; give a series explicitly")
    else:
        series = list(series)
    if series[0].order != G.order:
        series = [G.whole()] + series
    if series[-1].order != 1:
        series = series + [G.trivial()]
    if len(series) == 1 or G.order == 1:
        return NormResolution(1, length)
    quotients = []
    for N in series[1:]:
        quotients.append(G.quotient(N.elements))
    # top factor G/N_1
    Q1, proj1, sec1 = quotients[0]
    if not Q1.is_abelian():
        raise ValueError("non-abelian factor in series")
    R0, iso = resolution_of_abelian_group(Q1, length=length)
    R = RelabeledResolution(R0, Q1, iso)
    for i in range(1, len(series) - 1):
        Qi, proji, seci = quotients[i - 1]
        E, projE, secE = quotients[i]
        if i == len(series) - 2:
            E = G
        # K = image of N_i in E, abelian
        K = np.unique(projE[series[i].elements])
        Ksub = grp.Subgroup(E, K)
        if not E.is_abelian(Ksub):
            raise ValueError("non-abelian factor in series")
        RN0, isoN = resolution_of_abelian_group(E, K, length=length)
        Nstd = RN0.group
        proj = proji[secE]                      # E -> Q_i
        section = projE[seci]                   # Q_i -> E
        ext = ExtensionData(E, Qi, Nstd, proj, section, isoN)
        R = TwistedTensorProduct(R, RN0, ext=ext, length=length)
        R.strategy = "normal-series"
    return R


class RestrictedResolution(FreeResolution):
    """RG viewed over a subgroup H.

    The free generator (i, t) is t*e_i for t in a fixed right transversal
    (G = union of H t); it has index i*k + t, so summing a cochain over
    consecutive blocks of k entries gives the corestriction.
    """

    strategy = "restricted"

    def __init__(self, R, H):
        G = R.group
        Hgrp, emb = H.as_group()
        super().__init__(Hgrp, R.length)
        self.parent = R
        self.subgroup = H
        self.embedding = emb
        T = G.right_transversal(H)
        self.transversal = T
        k = len(T)
        self.index = k
        cos = np.empty(G.order, dtype=np.int64)
        hloc = np.empty(G.order, dtype=np.int64)
        local = -np.ones(G.order, dtype=np.int64)
        local[emb] = np.arange(len(emb))
        for c, t in enumerate(T):
            coset = G.mul[emb, t]
            cos[coset] = c
            hloc[coset] = np.arange(len(emb))
        self.coset_of = cos
        self.hpart = hloc
        self.dims = [d * k for d in R.dims]
        for n in range(1, R.length + 1):
            t = R.terms(n)
            g = G.mul[T[None, :], t.elt[:, None]]      # t * a for every term and coset
            src = (t.src[:, None] * k + np.arange(k)[None, :]).ravel()
            gen = (t.gen[:, None] * k + cos[g]).ravel()
            elt = hloc[g].ravel()
            coef = np.repeat(t.coef, k)
            self._terms[n] = Terms(src, coef, gen, elt)
        self._perms = {}

    def _perm(self, n):
        if n not in self._perms:
            G = self.parent.group
            nH = len(self.embedding)
            k = self.index
            NG = G.order
            i = np.arange(self.parent.dims[n])[:, None, None]
            t = np.arange(k)[None, :, None]
            h = np.arange(nH)[None, None, :]
            self._perms[n] = (i * NG + G.mul[self.embedding[h], self.transversal[t]]).ravel()
        return self._perms[n]

    def lift(self, n, Z):
        Z = np.asarray(Z, dtype=np.int64)
        Zg = np.zeros_like(Z)
        Zg[self._perm(n)] = Z
        Yg = self.parent.lift(n, Zg)
        return Yg[self._perm(n + 1)]


def restrict_to_subgroup(R, H):
    if not R.group.is_subgroup(H.elements):
        raise ValueError("not a subgroup")
    if H.order == R.group.order:
        return R
    return RestrictedResolution(R, H)


def derived_series_resolution(G, length=DEFAULT_LENGTH):
    """normal_series_resolution along the derived series of a solvable group."""
    series = G.derived_series()
    if series[-1].order != 1:
        raise ValueError("group is not solvable")
    return normal_series_resolution(G, series[1:], length=length)


def resolution_for(G, length=DEFAULT_LENGTH, strategy=None):
    """Pick a construction: norm/tensor for abelian, lower central series for
    nilpotent, derived series for solvable, kernel lifting otherwise."""
    if strategy is None:
        if G.order == 1:
            strategy = "norm"
        elif G.is_abelian():
            strategy = "abelian"
        elif G.is_nilpotent():
            strategy = "normal-series"
        elif G.is_solvable():
            strategy = "derived-series"
        else:
            strategy = "generic"
    if strategy == "norm":
        if not G.is_cyclic():
            raise ValueError("norm resolution needs a cyclic group")
        return norm_resolution_cyclic(G, length) if G.order > 1 else NormResolution(1, length)
    if strategy == "abelian":
        R0, iso = resolution_of_abelian_group(G, length=length)
        return RelabeledResolution(R0, G, iso)
    if strategy == "normal-series":
        return normal_series_resolution(G, length=length)
    if strategy == "derived-series":
        return derived_series_resolution(G, length=length)
    if strategy == "generic":
        return generic_finite_resolution(G, length=length)
    raise ValueError(f"unknown strategy {strategy}")


def fingerprint(G):
    """Structural fingerprint used to key caches (never trusted on its own)."""
    cls = sorted(len(c) for c in G.conjugacy_classes())
    derived = [H.order for H in G.derived_series()]
    return (G.order, tuple(G.abelian_invariants()), tuple(derived), tuple(cls))


class ResolutionCache:
    """In-memory cache of resolutions keyed by fingerprint, checked by table equality."""

    def __init__(self):
        self._store = {}

    def get(self, G, length=DEFAULT_LENGTH, strategy=None):
        key = (fingerprint(G), length, strategy)
        for H, R in self._store.get(key, []):
            if H is G or (H.order == G.order and np.array_equal(H.mul, G.mul)):
                return R
        R = resolution_for(G, length, strategy)
        self._store.setdefault(key, []).append((G, R))
        return R

    def clear(self):
        self._store.clear()


default_cache = ResolutionCache()


GENERIC_CAP = 1000


class KernelLiftingResolution(FreeResolution):
    """Resolution built degree by degree from integer kernels.

    The kernel of d_m is spanned by the vectors x - h(d x), h the homotopy
    already available in degree m - 1.  These candidates are taken in order
    as new free generators whenever they are not yet in the lattice spanned
    by the translates of the generators chosen so far.  Lifting solves
    against that lattice of translates.
    """

    strategy = "generic"

    def __init__(self, G, length=DEFAULT_LENGTH, cap=GENERIC_CAP):
        if G.order > cap:
            raise ValueError(f"group order {G.order} exceeds the generic resolution cap {cap}")
        super().__init__(G, length)
        N = G.order
        self.dims = [1]
        self._solvers = {}
        # the kernel of the augmentation is spanned by the g - 1; in higher
        # degrees the kernel of d_m is the image of x -> x - h(d x), which
        # keeps the candidate generators small
        for n in range(1, length + 1):
            m = n - 1
            if m == 0:
                kernel = []
                for g in range(1, N):
                    v = [0] * N
                    v[g] = 1
                    v[0] = -1
                    kernel.append(v)
            else:
                I = np.eye(self.dims[m] * N, dtype=np.int64)
                K = I - self.homotopy(m - 1, self.apply_boundary(m, I))
                kernel = [K[:, c].tolist() for c in range(K.shape[1]) if K[:, c].any()]
            gens, solver = self._choose_generators(kernel, self.dims[m])
            self._solvers[m] = (solver, len(gens))
            self.dims.append(len(gens))
            X = np.asarray(gens, dtype=np.int64).T.reshape(self.dims[m] * N, len(gens))
            self._terms[n] = Terms.from_dense(X, N)

    def _dense_boundary(self, n):
        return self.boundary_csr(n).toarray()

    def _translates(self, v, dim):
        N = self.group.order
        idx = left_action_index(self.group, np.arange(N), dim)
        v = np.asarray(v, dtype=np.int64)
        return v[idx]

    def _choose_generators(self, kernel, dim):
        lattice = EchelonLattice(dim * self.group.order)
        gens = []
        for v in kernel:
            if lattice.contains(v):
                continue
            k = len(gens)
            gens.append(list(v))
            for g, row in enumerate(self._translates(v, dim)):
                # label gen*N + g of the translate list is g * e_gen
                lattice.insert(row, k * self.group.order + g)
            lattice.nrows = len(gens) * self.group.order
        return gens, lattice

    def lift(self, n, Z):
        if n >= self.length:
            raise ValueError("degree out of range")
        Z = np.asarray(Z, dtype=np.int64)
        if Z.ndim == 1:
            return self.lift(n, Z[:, None])[:, 0]
        N = self.group.order
        solver, k = self._solvers[n]
        Y = np.zeros((self.dims[n + 1] * N, Z.shape[1]), dtype=np.int64)
        for c in range(Z.shape[1]):
            if not Z[:, c].any():
                continue
            x = solver.solve(Z[:, c].tolist())
            if x is None:
                raise RuntimeError("cycle lifting failed: input was not a cycle")
            # row gen*N + g of the translate list is g * e_gen
            Y[:, c] = x
        return Y


class EchelonLattice:
    """Lattice spanned by labelled integer rows, kept in Gauss-Jordan form.

    Basis rows have a unit pivot and every other basis row vanishes in its
    pivot column, so membership and solving are a single pass.  Remainders
    without a unit entry are kept aside and handled by an exact Hermite
    solve; for the group-ring kernels met here this is rare.  Each stored
    row remembers its expression in the inserted rows (a row of combos).
    """

    LIMIT = 1 << 40

    def __init__(self, ncols, nlabels=64):
        self.ncols = ncols
        self.nrows = 0
        self.cols = []
        self.rows = np.zeros((16, ncols), dtype=np.int64)
        self.combos = np.zeros((16, nlabels), dtype=np.int64)
        self.size = 0
        self.pending = []
        self._pending_solver = None

    def _grow(self, nrows=None, nlabels=None):
        if nrows is not None and nrows > self.rows.shape[0]:
            k = max(nrows, 2 * self.rows.shape[0])
            self.rows = np.vstack([self.rows, np.zeros((k - self.rows.shape[0], self.ncols), dtype=np.int64)])
            self.combos = np.vstack([self.combos, np.zeros((k - self.combos.shape[0], self.combos.shape[1]), dtype=np.int64)])
        if nlabels is not None and nlabels > self.combos.shape[1]:
            k = max(nlabels, 2 * self.combos.shape[1])
            self.combos = np.hstack([self.combos, np.zeros((self.combos.shape[0], k - self.combos.shape[1]), dtype=np.int64)])

    def _pad(self, c):
        k = self.combos.shape[1]
        return c if len(c) == k else np.concatenate([c, np.zeros(k - len(c), dtype=np.int64)])

    def _reduce(self, r, c):
        c = self._pad(c)
        if self.size:
            q = r[self.cols]
            nz = np.nonzero(q)[0]
            if len(nz):
                r = r - q[nz] @ self.rows[nz]
                c = c - q[nz] @ self.combos[nz]
        return r, c

    def insert(self, row, label):
        """Insert the row with the given label; returns True if the lattice grew."""
        self._grow(nlabels=label + 1)
        r = np.asarray(row, dtype=np.int64)
        c = np.zeros(self.combos.shape[1], dtype=np.int64)
        c[label] = 1
        return self._insert(r, c)

    def _insert(self, r, c):
        r, c = self._reduce(r, c)
        if not r.any():
            return False
        units = np.nonzero(np.abs(r) == 1)[0]
        if len(units) == 0:
            # a remainder already in the span of the pending rows adds nothing
            if self.pending and self._solve_pending(r) is not None:
                return False
            self.pending.append((r, c))
            self._pending_solver = None
            return True
        piv = int(units[0])
        if r[piv] < 0:
            r, c = -r, -c
        n = self.size
        if n:
            f = self.rows[:n, piv].copy()
            nz = np.nonzero(f)[0]
            if len(nz):
                self.rows[nz] -= np.outer(f[nz], r)
                self.combos[nz] -= np.outer(f[nz], c)
                if np.abs(self.rows[nz]).max() > self.LIMIT or np.abs(self.combos[nz]).max() > self.LIMIT:
                    raise OverflowError("coefficient growth in lattice basis")
        self._grow(nrows=n + 1)
        self.rows[n] = r
        self.combos[n] = c
        self.cols.append(piv)
        self.size += 1
        if self.pending:
            # pending rows are already reduced by the older rows; clearing the
            # new pivot column keeps them reduced, and rows that gain a unit
            # entry are promoted
            old, self.pending = self.pending, []
            self._pending_solver = None
            promote = []
            for pr, pc in old:
                f = pr[piv]
                if f:
                    pr, pc = pr - f * r, self._pad(pc) - f * c
                if not pr.any():
                    continue
                if (np.abs(pr) == 1).any():
                    promote.append((pr, pc))
                else:
                    self.pending.append((pr, pc))
            for pr, pc in promote:
                self._insert(pr, pc)
        return True

    def _solve_pending(self, r, unique_first=False):
        """Integer y with y * pending = r, or None.

        The solve runs on columns where the pending rows have full rank mod a
        large prime, and the answer is checked on all columns, so a returned
        y is always exact.  For an unlucky prime the projection could miss a
        solution; for membership tests that only costs a redundant row.
        With unique_first, a solve against a linearly independent subset of
        the pending rows is tried first: its solution is unique and stays
        small, where the Hermite solve over redundant rows can blow up.
        """
        P = np.array([p for p, _ in self.pending], dtype=np.int64)
        if self._pending_solver is None:
            rows, cols = _independent_rows_and_columns(P)
            self._pending_solver = (cols, zmatrix.LeftSolver(P[:, cols].tolist()), rows, None)
        cols, small, rows, basis = self._pending_solver
        Pobj = P.astype(object)
        if unique_first:
            if basis is None:
                basis = zmatrix.LeftSolver(P[np.ix_(rows, cols)].tolist())
                self._pending_solver = (cols, small, rows, basis)
            z = basis.solve(r[cols].tolist())
            if z is not None:
                y = [0] * len(P)
                for i, a in zip(rows, z):
                    y[i] = a
                if (np.asarray(y, dtype=object) @ Pobj == r).all():
                    return y
        y = small.solve(r[cols].tolist())
        if y is None or not (np.asarray(y, dtype=object) @ Pobj == r).all():
            return None
        return y

    def contains(self, v):
        """Lattice membership, without tracking the combination."""
        r = np.asarray(v, dtype=np.int64)
        if self.size:
            q = r[self.cols]
            nz = np.nonzero(q)[0]
            if len(nz):
                r = r - q[nz] @ self.rows[nz]
        return not r.any() or (bool(self.pending) and self._solve_pending(r) is not None)

    def solve(self, v):
        r = np.asarray(v, dtype=np.int64)
        x = np.zeros(self.combos.shape[1], dtype=np.int64)
        r, x = self._reduce(r, x)
        x = -x
        if r.any():
            if not self.pending:
                return None
            y = self._solve_pending(r, unique_first=True)
            if y is None:
                return None
            for (_, pc), a in zip(self.pending, y):
                if a:
                    if abs(int(a)) > self.LIMIT:
                        raise OverflowError("coefficient growth in lattice solve")
                    x = x + int(a) * self._pad(pc)
        out = np.zeros(self.nrows, dtype=np.int64)
        m = min(self.nrows, len(x))
        out[:m] = x[:m]
        return out


def _independent_rows_and_columns(P, p=2147483629):
    """Rows kept and pivot columns of the row echelon form of P mod p."""
    A = np.mod(P, p)
    rows, cols = [], []
    for i in range(A.shape[0]):
        nz = np.nonzero(A[i])[0]
        if not len(nz):
            continue
        j = int(nz[0])
        rows.append(i)
        cols.append(j)
        inv = pow(int(A[i, j]), -1, p)
        A[i] = A[i] * inv % p
        for k in range(i + 1, A.shape[0]):
            f = int(A[k, j])
            if f:
                A[k] = (A[k] - f * A[i]) % p
    return rows, sorted(cols)


def generic_finite_resolution(G, length=DEFAULT_LENGTH, cap=GENERIC_CAP):
    return KernelLiftingResolution(G, length, cap)
