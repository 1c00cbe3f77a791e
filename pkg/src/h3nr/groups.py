"""Finite groups given by an explicit multiplication table.

Elements are indices 0..n-1 with 0 the identity.  Groups come from
permutation generators or from polycyclic power-commutator presentations;
either way everything downstream works with the integer table.
"""

import re
from math import gcd

import numpy as np

from . import zmatrix

ORDER_CAP = 10 ** 5
TABLE_CAP = 4096


def _primes_of(n):
    ps, p = [], 2
    while p * p <= n:
        if n % p == 0:
            ps.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        ps.append(n)
    return ps


def _bitmask(elements, n):
    flags = np.zeros(n, dtype=bool)
    flags[elements] = True
    return int.from_bytes(np.packbits(flags, bitorder="little").tobytes(), "little")


class Subgroup:
    """A subgroup stored as a sorted array of element indices of its parent."""

    def __init__(self, parent, elements, generators=None):
        self.parent = parent
        self.elements = np.asarray(sorted(set(int(x) for x in elements)), dtype=np.int64)
        self.order = len(self.elements)
        if generators is None:
            generators = parent.generating_set(self.elements)
        self.generators = [int(g) for g in generators]
        self._key = None
        self._group = None

    @property
    def key(self):
        """Bitmask of the element set; equal keys mean equal subgroups."""
        if self._key is None:
            self._key = _bitmask(self.elements, self.parent.order)
        return self._key

    def __contains__(self, g):
        i = np.searchsorted(self.elements, g)
        return i < self.order and self.elements[i] == g

    def __eq__(self, other):
        return isinstance(other, Subgroup) and self.parent is other.parent and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __le__(self, other):
        return self.key & other.key == self.key

    def __repr__(self):
        return f"Subgroup(order={self.order}, generators={self.generators})"

    def as_group(self):
        """(FiniteGroup on 0..|H|-1, embedding array into the parent)."""
        if self._group is None:
            self._group = self.parent.subgroup_as_group(self.elements)
        return self._group


class GroupHomomorphism:
    """A map between finite groups given on every element."""

    def __init__(self, source, target, images):
        self.source = source
        self.target = target
        self.images = np.asarray(images, dtype=np.int64)

    @classmethod
    def from_generators(cls, source, target, gens, imgs):
        """Extend generator images to all elements, checking consistency."""
        images = -np.ones(source.order, dtype=np.int64)
        images[0] = 0
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for g, h in zip(gens, imgs):
                    y = source.mul[x, g]
                    v = target.mul[images[x], h]
                    if images[y] < 0:
                        images[y] = v
                        nxt.append(y)
                    elif images[y] != v:
                        raise ValueError("generator images do not define a homomorphism")
            frontier = nxt
        if (images < 0).any():
            raise ValueError("generators do not generate the source")
        hom = cls(source, target, images)
        if source.order <= 512 and not hom.is_homomorphism():
            raise ValueError("generator images do not define a homomorphism")
        return hom

    def __call__(self, x):
        return self.images[x]

    def is_homomorphism(self):
        im = self.images
        return bool((im[self.source.mul] == self.target.mul[im[:, None], im[None, :]]).all())


class FiniteGroup:
    """A finite group with a dense multiplication table."""

    def __init__(self, mul, labels=None, generators=None, source=None, check=False):
        mul = np.ascontiguousarray(mul, dtype=np.int32)
        n = mul.shape[0]
        if mul.shape != (n, n):
            raise ValueError("multiplication table must be square")
        if not (mul[0] == np.arange(n)).all() or not (mul[:, 0] == np.arange(n)).all():
            raise ValueError("element 0 must be the identity")
        self.mul = mul
        self.order = n
        self.identity = 0
        self.labels = labels
        self.source = source
        inv = np.empty(n, dtype=np.int64)
        rows, cols = np.nonzero(mul == 0)
        inv[rows] = cols
        self.inv = inv
        self._element_orders = None
        self._classes = None
        self._subgroup_classes = None
        if check and not self.is_associative():
            raise ValueError("multiplication is not associative")
        if generators is None:
            generators = self.generating_set(np.arange(n))
        self.generators = [int(g) for g in generators]

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"

    @property
    def elements(self):
        return range(self.order)

    @property
    def right_mul(self):
        """right_mul[a] is the permutation g -> g*a (a contiguous copy of mul.T)."""
        if getattr(self, "_right_mul", None) is None:
            self._right_mul = np.ascontiguousarray(self.mul.T)
        return self._right_mul

    def is_associative(self):
        m = self.mul
        for a in range(self.order):
            if not (m[m[a]][:, :] == m[a][m]).all():
                return False
        return True

    # -- element arithmetic -------------------------------------------------

    def power(self, g, k):
        k %= self.element_order(g)
        r = 0
        for _ in range(k):
            r = self.mul[r, g]
        return int(r)

    @property
    def element_orders(self):
        if self._element_orders is None:
            n = self.order
            orders = np.ones(n, dtype=np.int64)
            cur = np.arange(n)
            k = 1
            while True:
                todo = cur != 0
                if not todo.any():
                    break
                k += 1
                cur = np.where(todo, self.mul[cur, np.arange(n)], 0)
                orders[todo] = k
            self._element_orders = orders
        return self._element_orders

    def element_order(self, g):
        return int(self.element_orders[g])

    @property
    def exponent(self):
        e = 1
        for o in set(self.element_orders.tolist()):
            e = e * o // gcd(e, o)
        return e

    def conjugate(self, elements, g):
        """g^-1 * S * g, returned sorted."""
        e = np.asarray(elements)
        return np.sort(self.mul[self.mul[self.inv[g], e], g])

    def commutator(self, a, b):
        m = self.mul
        return m[m[self.inv[a], self.inv[b]], m[a, b]]

    # -- subgroups ----------------------------------------------------------

    def closure(self, gens, start=None):
        """Sorted element array of the subgroup generated by gens (and start)."""
        n = self.order
        flags = np.zeros(n, dtype=bool)
        flags[0] = True
        if start is not None:
            flags[np.asarray(start)] = True
        gens = [int(g) for g in gens]
        frontier = np.nonzero(flags)[0]
        while len(frontier):
            new = []
            for g in gens:
                y = self.mul[frontier, g]
                y = y[~flags[y]]
                if len(y):
                    y = np.unique(y)
                    flags[y] = True
                    new.append(y)
            frontier = np.concatenate(new) if new else np.empty(0, dtype=np.int64)
        return np.nonzero(flags)[0]

    def generating_set(self, elements):
        """A short generating set, chosen greedily by decreasing element order."""
        elements = np.asarray(elements)
        if len(elements) <= 1:
            return []
        orders = self.element_orders[elements]
        cand = elements[np.lexsort((elements, -orders))]
        target = len(elements)
        gens = []
        have = np.zeros(self.order, dtype=bool)
        have[0] = True
        size = 1
        for g in cand:
            if not have[g]:
                gens.append(int(g))
                sub = self.closure(gens)
                have[sub] = True
                size = len(sub)
                if size == target:
                    break
        return gens

    def subgroup(self, gens=None, elements=None):
        if elements is None:
            elements = self.closure(gens)
            return Subgroup(self, elements, generators=[int(g) for g in gens if g != 0])
        return Subgroup(self, elements)

    def whole(self):
        return Subgroup(self, np.arange(self.order), generators=self.generators)

    def trivial(self):
        return Subgroup(self, [0], generators=[])

    def _as_elements(self, S):
        if isinstance(S, Subgroup):
            return S.elements
        e = np.asarray(sorted(set(int(x) for x in S)), dtype=np.int64)
        if len(e) and (e[0] < 0 or e[-1] >= self.order):
            raise ValueError("subset not contained in the group")
        return e

    def is_subgroup(self, elements):
        e = self._as_elements(elements)
        if len(e) == 0 or e[0] != 0:
            return False
        prod = self.mul[np.ix_(e, e)]
        return bool(np.isin(prod, e).all())

    def centralizer(self, S):
        """Elements commuting with every element of S."""
        e = self._as_elements(S)
        ok = np.ones(self.order, dtype=bool)
        for s in e:
            ok &= self.mul[:, s] == self.mul[s, :]
        return Subgroup(self, np.nonzero(ok)[0])

    def center(self):
        return self.centralizer(np.arange(self.order))

    def normalizer(self, S, within=None):
        """Elements g with g^-1 S g = S (optionally only g in `within`)."""
        e = self._as_elements(S)
        flags = np.zeros(self.order, dtype=bool)
        flags[e] = True
        cand = np.arange(self.order) if within is None else self._as_elements(within)
        done = np.zeros(self.order, dtype=bool)
        keep = []
        for g in cand:
            if done[g]:
                continue
            # the normalizer contains S, so test one element per coset S*g
            coset = self.mul[e, g]
            done[coset] = True
            if flags[self.mul[self.mul[self.inv[g], e], g]].all():
                keep.append(coset)
        elems = np.concatenate(keep)
        if within is not None:
            elems = elems[np.isin(elems, cand)]
        return Subgroup(self, elems)

    def normal_closure(self, S, within=None):
        """Smallest subgroup of `within` normalized by `within` containing S."""
        W = self.whole() if within is None else within
        e = self._as_elements(S)
        cur = self.closure(e)
        while True:
            conj = [self.mul[self.mul[self.inv[g], cur], g] for g in W.generators]
            nxt = self.closure(np.concatenate([cur] + conj)) if conj else cur
            if len(nxt) == len(cur):
                return Subgroup(self, cur)
            cur = nxt

    def commutator_subgroup(self, A, B):
        """[A, B] generated by commutators of generators, closed under A and B."""
        A = A if isinstance(A, Subgroup) else Subgroup(self, self._as_elements(A))
        B = B if isinstance(B, Subgroup) else Subgroup(self, self._as_elements(B))
        comms = [self.commutator(a, b) for a in A.generators for b in B.generators]
        if not comms:
            return self.trivial()
        AB = Subgroup(self, self.closure(A.generators + B.generators))
        return self.normal_closure(comms, within=AB)

    def derived_subgroup(self, H=None):
        H = self.whole() if H is None else H
        return self.commutator_subgroup(H, H)

    def is_abelian(self, H=None):
        H = self.whole() if H is None else H
        g = H.generators
        return all(self.mul[a, b] == self.mul[b, a] for a in g for b in g)

    def lower_central_series(self):
        series = [self.whole()]
        while True:
            nxt = self.commutator_subgroup(series[-1], self.whole())
            if nxt.order == series[-1].order:
                break
            series.append(nxt)
        return series

    def derived_series(self):
        series = [self.whole()]
        while True:
            nxt = self.derived_subgroup(series[-1])
            if nxt.order == series[-1].order:
                break
            series.append(nxt)
        return series

    def is_nilpotent(self):
        return self.lower_central_series()[-1].order == 1

    def is_solvable(self):
        return self.derived_series()[-1].order == 1

    def is_p_group(self):
        return len(_primes_of(self.order)) == 1

    def is_cyclic(self, H=None):
        H = self.whole() if H is None else H
        return bool((self.element_orders[H.elements] == H.order).any())

    def subgroup_as_group(self, elements):
        """The subgroup on its own, elements relabelled in increasing order."""
        e = np.asarray(elements, dtype=np.int64)
        local = -np.ones(self.order, dtype=np.int64)
        local[e] = np.arange(len(e))
        mul = local[self.mul[np.ix_(e, e)]]
        if (mul < 0).any():
            raise ValueError("not a subgroup")
        labels = None if self.labels is None else [self.labels[i] for i in e]
        gens = [int(local[g]) for g in self.generating_set(e)]
        return FiniteGroup(mul, labels=labels, generators=gens), e

    def quotient(self, N):
        """(Q, projection, section) for a normal subgroup N.

        Cosets are numbered by their smallest element, which is also the
        section value, so section(1) = 1.
        """
        e = self._as_elements(N)
        label = -np.ones(self.order, dtype=np.int64)
        reps = []
        for g in range(self.order):
            if label[g] < 0:
                label[self.mul[g, e]] = len(reps)
                reps.append(g)
        reps = np.asarray(reps, dtype=np.int64)
        qmul = label[self.mul[np.ix_(reps, reps)]]
        gens = sorted(set(int(label[g]) for g in self.generators) - {0})
        Q = FiniteGroup(qmul, generators=gens)
        return Q, label, reps

    def right_transversal(self, H):
        """Coset representatives t with G = union of H*t, one per coset.

        Each representative is the smallest element index of its coset, and
        the list is in increasing order.
        """
        e = self._as_elements(H)
        seen = np.zeros(self.order, dtype=bool)
        reps = []
        for g in range(self.order):
            if not seen[g]:
                seen[self.mul[e, g]] = True
                reps.append(g)
        return np.asarray(reps, dtype=np.int64)

    def double_cosets(self, H, K):
        """Double cosets H g K as sorted element arrays."""
        h = self._as_elements(H)
        k = self._as_elements(K)
        seen = np.zeros(self.order, dtype=bool)
        out = []
        for g in range(self.order):
            if not seen[g]:
                d = np.unique(self.mul[self.mul[h, g][:, None], k[None, :]])
                seen[d] = True
                out.append(d)
        return out

    def abelian_invariants(self, H=None):
        """Torsion invariants of H/[H,H] in divisibility order."""
        H = self.whole() if H is None else H
        D = self.derived_subgroup(H)
        K, emb = H.as_group()
        local = np.searchsorted(H.elements, D.elements)
        Q, _, _ = K.quotient(local)
        return abelian_basis(Q)[0]

    def conjugacy_classes(self):
        """Conjugacy classes of elements as sorted arrays, ordered by smallest element."""
        if self._classes is None:
            seen = np.zeros(self.order, dtype=bool)
            out = []
            allg = np.arange(self.order)
            for g in range(self.order):
                if not seen[g]:
                    c = np.unique(self.mul[self.mul[self.inv[allg], g], allg])
                    seen[c] = True
                    out.append(c)
            self._classes = out
        return self._classes

    def maximal_subgroup_classes(self):
        classes = self.subgroup_classes()
        proper = [c for c in classes if c.order < self.order]
        out = []
        for i, H in enumerate(proper):
            maximal = True
            for K in proper[i + 1:]:
                if K.order > H.order and K.order % H.order == 0 and self._contains_conjugate(K, H):
                    maximal = False
                    break
            if maximal:
                out.append(H)
        return out

    def _contains_conjugate(self, K, H):
        """Is some conjugate of H contained in K?"""
        for key in self.conjugates(H):
            if key & K.key == key:
                return True
        return False

    def conjugates(self, H):
        """Bitmask keys of all conjugates of H."""
        orbit = {H.key: H.elements}
        frontier = [H.elements]
        while frontier:
            nxt = []
            for e in frontier:
                for g in self.generators:
                    c = self.conjugate(e, g)
                    k = _bitmask(c, self.order)
                    if k not in orbit:
                        orbit[k] = c
                        nxt.append(c)
            frontier = nxt
        return orbit

    def subgroup_classes(self):
        """One representative per conjugacy class of subgroups.

        Sorted by order, then by the class key (the smallest bitmask among
        the conjugates); the representative is the conjugate with that key.
        """
        if self._subgroup_classes is None:
            self._subgroup_classes = _subgroup_classes(self)
        return self._subgroup_classes

    def cyclic_subgroup_classes(self):
        return [H for H in self.subgroup_classes() if self.is_cyclic(H)]


def _subgroup_classes(G):
    """Cyclic extension: every non-perfect U contains a normal V of prime index."""
    n = G.order
    found = {}       # conjugate key -> class index
    reps = []        # (elements, generators)

    def register(elements, gens):
        key = _bitmask(elements, n)
        if key in found:
            return False
        H = Subgroup(G, elements, generators=gens)
        orbit = G.conjugates(H)
        idx = len(reps)
        for k in orbit:
            found[k] = idx
        best = min(orbit)
        reps.append((orbit[best], best))
        return True

    register(np.array([0]), [])
    for P in _perfect_subgroups(G):
        register(P.elements, P.generators)
    i = 0
    orders = G.element_orders
    while i < len(reps):
        V, _ = reps[i]
        i += 1
        Vsub = Subgroup(G, V)
        N = G.normalizer(V)
        flags = np.zeros(n, dtype=bool)
        flags[V] = True
        seen = flags.copy()
        for x in N.elements:
            if seen[x]:
                continue
            coset = G.mul[V, x]
            seen[coset] = True
            # order of xV in N/V
            k, y = 1, x
            while not flags[y]:
                y = G.mul[y, x]
                k += 1
            if len(_primes_of(k)) != 1 or _primes_of(k)[0] != k:
                continue
            U = G.closure([x], start=V)
            register(U, Vsub.generators + [int(x)])
    subs = [Subgroup(G, e) for e, _ in reps]
    keys = [k for _, k in reps]
    idx = sorted(range(len(subs)), key=lambda j: (subs[j].order, keys[j]))
    return [subs[j] for j in idx]


def _perfect_subgroups(G):
    """Nontrivial perfect subgroups, one per conjugacy class (two-generated search)."""
    if G.is_solvable():
        return []
    out = {}
    reps = [c[0] for c in G.conjugacy_classes() if c[0] != 0]
    for a in reps:
        for b in range(1, G.order):
            e = G.closure([a, b])
            if len(e) < 5:
                continue
            key = _bitmask(e, G.order)
            if key in out:
                continue
            H = Subgroup(G, e, generators=[a, b])
            if G.derived_subgroup(H).order != H.order:
                continue
            orbit = G.conjugates(H)
            if any(k in out for k in orbit):
                continue
            out[key] = H
    return sorted(out.values(), key=lambda H: H.order)


def abelian_basis(A, elements=None):
    """Invariants and a basis of an abelian group (or abelian subgroup).

    Returns (invariants, generators) with A the internal direct sum of the
    cyclic groups generated by the generators, whose orders are the
    invariants in divisibility order.
    """
    e = np.arange(A.order) if elements is None else np.asarray(elements)
    if len(e) == 1:
        return [], []
    ys = A.generating_set(e)
    ords = [A.element_order(y) for y in ys]
    # relation lattice by enumerating exponent vectors
    rels = []
    for i, o in enumerate(ords):
        r = [0] * len(ys)
        r[i] = o
        rels.append(r)
    pos = {}
    vecs = [[]]
    vals = [0]
    for y, o in zip(ys, ords):
        nv, nvals = [], []
        for v, x in zip(vecs, vals):
            z = x
            for k in range(o):
                nv.append(v + [k])
                nvals.append(z)
                z = A.mul[z, y]
        vecs, vals = nv, nvals
    for v, x in zip(vecs, vals):
        x = int(x)
        if x in pos:
            rels.append([a - b for a, b in zip(v, pos[x])])
        else:
            pos[x] = v
    snf = zmatrix.smith_normal_form(rels)
    diag = snf.diagonal()
    Q = snf.coltrans
    # new coordinates c' = c * Q, so basis element k has coordinates e_k Q^-1
    Qinv = _unimodular_inverse(Q)
    invariants, gens = [], []
    for k, d in enumerate(diag):
        if d > 1:
            g = 0
            for y, c, o in zip(ys, Qinv[k], ords):
                g = A.mul[g, A.power(y, c % o)]
            invariants.append(d)
            gens.append(int(g))
    return invariants, gens


def _unimodular_inverse(Q):
    n = len(Q)
    rows = [list(Q[i]) + [1 if i == j else 0 for j in range(n)] for i in range(n)]
    H = zmatrix.hermite_normal_form(rows)
    return [row[n:] for row in H]


# -- construction from presentations ------------------------------------------

def from_permutations(perms, cap=ORDER_CAP):
    """Group generated by permutations given as image lists on 0..d-1.

    The product a*b applies a first, then b.
    """
    perms = [tuple(int(x) for x in p) for p in perms]
    d = max((len(p) for p in perms), default=1)
    perms = [p + tuple(range(len(p), d)) for p in perms]
    ident = tuple(range(d))
    index = {ident: 0}
    elts = [ident]
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for p in perms:
                y = tuple(p[i] for i in x)
                if y not in index:
                    index[y] = len(elts)
                    elts.append(y)
                    nxt.append(y)
                    if len(elts) > cap:
                        raise ValueError("order cap exceeded")
        frontier = nxt
    n = len(elts)
    if n > TABLE_CAP * 4:
        raise ValueError("order cap exceeded for a dense table")
    P = np.asarray(elts, dtype=np.int64)
    base = d
    keys = (P * base ** np.arange(d)).sum(axis=1)
    order = np.argsort(keys)
    sk = keys[order]
    mul = np.empty((n, n), dtype=np.int32)
    for a in range(n):
        # (a*b)[x] = b[a[x]], one row per b
        prod = P[:, P[a]]
        k = (prod * base ** np.arange(d)).sum(axis=1)
        mul[a] = order[np.searchsorted(sk, k)]
    gens = [index[p] for p in perms if p != ident]
    return FiniteGroup(mul, labels=elts, generators=gens, source=("perm", perms))


def from_pc(orders, powers, comms, cap=ORDER_CAP):
    """Group from a polycyclic presentation.

    orders: relative orders o_1..o_k of generators a_1..a_k.
    powers: dict i -> exponent vector of a_i^{o_i}.
    comms: dict (i, j), i < j -> exponent vector of [a_i, a_j] = a_i^-1 a_j^-1 a_i a_j.
    Indices are 0-based.  Element index is the mixed-radix value of the
    normal-form exponent vector with a_1 most significant.
    """
    k = len(orders)
    total = 1
    for o in orders:
        total *= o
    if total > cap:
        raise ValueError("order cap exceeded")
    if total > TABLE_CAP:
        raise ValueError("order above the dense-table limit")
    if k == 0:
        return FiniteGroup(np.zeros((1, 1), dtype=np.int32), labels=[()], generators=[], source=("pc", [], {}, {}))
    # G_i = <a_i..a_k>; build from the bottom
    sizes = [1] * (k + 1)
    for i in range(k - 1, -1, -1):
        sizes[i] = sizes[i + 1] * orders[i]

    def elem(vec, i):
        # normal-form word over a_{i+1}..a_k; its index in G_{i+1} is mixed radix
        for j in range(i + 1):
            if vec[j]:
                raise ValueError("presentation is not polycyclic")
        return int(sum(vec[j] * sizes[j + 1] for j in range(i + 1, k)))

    o = orders[k - 1]
    mul = (np.arange(o)[:, None] + np.arange(o)[None, :]) % o
    for i in range(k - 2, -1, -1):
        m = sizes[i + 1]
        p = orders[i]
        sub = mul
        w = elem(powers.get(i, [0] * k), i)
        inv_sub = np.empty(m, dtype=np.int64)
        r, c = np.nonzero(sub == 0)
        inv_sub[r] = c
        # sigma(a_j) = a_i^-1 a_j a_i = a_j [a_i, a_j]^-1
        gimg = {}
        for j in range(i + 1, k):
            aj = sizes[j + 1]
            cij = elem(comms.get((i, j), [0] * k), i)
            gimg[j] = int(sub[aj, inv_sub[cij]])
        sigma = np.empty(m, dtype=np.int64)
        for x in range(m):
            rem, y = x, 0
            for j in range(i + 1, k):
                e, rem = divmod(rem, sizes[j + 1])
                for _ in range(e):
                    y = sub[y, gimg[j]]
            sigma[x] = y
        if len(set(sigma.tolist())) != m or not (sigma[sub] == sub[sigma[:, None], sigma[None, :]]).all():
            raise ValueError("inconsistent presentation: conjugation is not an automorphism")
        if sigma[w] != w:
            raise ValueError("inconsistent presentation: power relation not central for its generator")
        sp = np.arange(m)
        S = [sp]
        for _ in range(p - 1):
            sp = sigma[sp]
            S.append(sp)
        sp = sigma[sp]
        conj_w = sub[sub[inv_sub[w], np.arange(m)], w]
        if not (sp == conj_w).all():
            raise ValueError("inconsistent presentation: power of conjugation mismatch")
        big = np.empty((p * m, p * m), dtype=np.int32)
        for e in range(p):
            for f in range(p):
                s = e + f
                if s >= p:
                    rows = sub[w, S[f]]
                    s -= p
                else:
                    rows = S[f]
                big[e * m:(e + 1) * m, f * m:(f + 1) * m] = sub[rows] + s * m
        mul = big
    labels = []
    for x in range(total):
        vec, rem = [], x
        for j in range(k):
            e, rem = divmod(rem, sizes[j + 1])
            vec.append(e)
        labels.append(tuple(vec))
    gens = [sizes[j + 1] for j in range(k)]
    G = FiniteGroup(mul, labels=labels, generators=gens, source=("pc", list(orders), powers, comms))
    return G


_word_re = re.compile(r"^a(\d+)(?:\^(-?\d+))?$")


def _parse_word(word, k, orders):
    vec = [0] * k
    word = word.strip()
    if word in ("1", "id", ""):
        return vec
    last = -1
    for part in word.split("*"):
        mt = _word_re.match(part.strip())
        if not mt:
            raise ValueError(f"bad word: {word}")
        j = int(mt.group(1)) - 1
        if j <= last:
            raise ValueError(f"word not in normal form: {word}")
        last = j
        e = int(mt.group(2) or 1)
        if not 0 <= j < k:
            raise ValueError(f"unknown generator in word: {word}")
        vec[j] += e
    for j in range(k):
        if vec[j] < 0 or vec[j] >= orders[j]:
            raise ValueError(f"word not in normal form: {word}")
    return vec


def _parse_cycles(text):
    perms = []
    text = text.strip()
    # split at top-level commas/whitespace between generators
    gens, depth, cur = [], 0, ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and ch == ",":
            gens.append(cur)
            cur = ""
        else:
            cur += ch
    if cur.strip():
        gens.append(cur)
    for g in gens:
        cycles = re.findall(r"\(([^()]*)\)", g)
        if not cycles and g.strip() not in ("()", ""):
            raise ValueError(f"bad permutation: {g}")
        pts = []
        for c in cycles:
            pts.append([int(x) for x in re.split(r"[\s,]+", c.strip()) if x])
        perms.append(pts)
    d = max((max(c) for p in perms for c in p if c), default=1)
    out = []
    for p in perms:
        img = list(range(d))
        for c in p:
            for a, b in zip(c, c[1:] + c[:1]):
                img[a - 1] = b - 1
        out.append(img)
    return out


def parse_presentation(text):
    """Parse the text presentation format into a descriptor tuple."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty presentation")
    head = lines[0]
    if head.startswith("perm:"):
        body = " ".join([head[5:]] + lines[1:])
        return ("perm", _parse_cycles(body))
    if head.startswith("pc:"):
        parts = [s.strip() for s in " ; ".join([head[3:]] + lines[1:]).split(";") if s.strip()]
        mt = re.match(r"n\s*=\s*\[([^\]]*)\]", parts[0])
        if not mt:
            raise ValueError("pc presentation needs n=[...]")
        orders = [int(x) for x in mt.group(1).split(",") if x.strip()]
        k = len(orders)
        powers, comms = {}, {}
        for rel in parts[1:]:
            lhs, rhs = [s.strip() for s in rel.split("=")]
            mc = re.match(r"^\[a(\d+)\s*,\s*a(\d+)\]$", lhs)
            mp = re.match(r"^a(\d+)\^(\d+)$", lhs)
            if mc:
                i, j = int(mc.group(1)) - 1, int(mc.group(2)) - 1
                if not (0 <= i < j < k):
                    raise ValueError(f"bad commutator relation: {rel}")
                comms[(i, j)] = _parse_word(rhs, k, orders)
            elif mp:
                i, e = int(mp.group(1)) - 1, int(mp.group(2))
                if not 0 <= i < k or e != orders[i]:
                    raise ValueError(f"bad power relation: {rel}")
                powers[i] = _parse_word(rhs, k, orders)
            else:
                raise ValueError(f"bad relation: {rel}")
        return ("pc", orders, powers, comms)
    raise ValueError("presentation must start with 'perm:' or 'pc:'")


def from_presentation(presentation, cap=ORDER_CAP):
    """Build a FiniteGroup from presentation text or a parsed descriptor."""
    if isinstance(presentation, str):
        presentation = parse_presentation(presentation)
    kind = presentation[0]
    if kind == "perm":
        return from_permutations(presentation[1], cap=cap)
    if kind == "pc":
        return from_pc(presentation[1], presentation[2], presentation[3], cap=cap)
    raise ValueError(f"unknown presentation kind {kind}")


def cyclic_group(n):
    mul = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
    return FiniteGroup(mul, labels=list(range(n)), generators=[1] if n > 1 else [])


def direct_product(A, B):
    """A x B with element index a*|B| + b."""
    na, nb = A.order, B.order
    ia = np.arange(na * nb) // nb
    ib = np.arange(na * nb) % nb
    mul = A.mul[ia[:, None], ia[None, :]].astype(np.int64) * nb + B.mul[ib[:, None], ib[None, :]]
    gens = [a * nb for a in A.generators] + list(B.generators)
    return FiniteGroup(mul, generators=gens)


def abelian_group(invariants):
    """Direct product of cyclic groups, mixed-radix indexing (first factor major)."""
    G = cyclic_group(1)
    for m in invariants:
        G = direct_product(G, cyclic_group(m))
    return G
