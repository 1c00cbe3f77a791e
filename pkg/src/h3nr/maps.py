"""Chain maps between resolutions, restriction, corestriction and cup products."""

import numpy as np
import scipy.sparse as sp

from . import groups as grp
from . import resolutions as res
from . import zmatrix
from .cohomology import ClassVector, CohomologyData

# rough bound on the number of int64 entries in one gathered block
CHUNK_ENTRIES = 1 << 23


def _images_array(hom, source_order):
    if isinstance(hom, grp.GroupHomomorphism):
        return np.asarray(hom.images, dtype=np.int64)
    if hom is None:
        return np.arange(source_order, dtype=np.int64)
    return np.asarray(hom, dtype=np.int64)


class EquivariantChainMap:
    """A chain map RA -> RB over a homomorphism phi: A -> B.

    F[n] is the dense image of the degree-n generators of RA (one column
    each, as vectors of RB in degree n), stored only with keep=True.
    Otherwise images are kept in trivialised form T[n][x, i], the total
    coefficient of the target generator x in the image of source generator
    i; cochains pull back as T[n].T @ u.
    """

    def __init__(self, RA, RB, hom=None, top=None, keep=None):
        top = min(RA.length, RB.length - 1) if top is None else top
        if top >= RB.length:
            raise ValueError("target resolution too short to lift in the requested degree")
        self.source, self.target = RA, RB
        self.images = _images_array(hom, RA.group.order)
        self.top = top
        NB = RB.group.order
        self.F = {}
        self.T = {}
        # every degree-0 generator goes to the identity times the first target
        # generator, which is compatible with the augmentations
        F = np.zeros((RB.dims[0] * NB, RA.dims[0]), dtype=np.int64)
        F[0, :] = 1
        self.F[0] = F
        self.T[0] = self._trivialise(F, 0)
        for n in range(1, top + 1):
            F = self._next(n, F)
            self.T[n] = self._trivialise(F, n)
            if keep:
                self.F[n] = F

    def _trivialise(self, F, n):
        NB = self.target.group.order
        return F.reshape(self.target.dims[n], NB, F.shape[1]).sum(axis=1)

    def _next(self, n, Fprev):
        RA, RB = self.source, self.target
        t = RA.terms(n)
        rows = Fprev.shape[0]
        dimB = RB.dims[n - 1]
        NB = RB.group.order
        out = np.zeros((RB.dims[n] * NB, RA.dims[n]), dtype=np.int64)
        if len(t) == 0:
            return out
        phi = self.images[t.elt]
        # left action index: coordinate (gen, h) of b*v is v at (gen, b^-1 h)
        inv = RB.group.inv
        mul = RB.group.mul
        step = max(1, CHUNK_ENTRIES // max(rows, 1))
        bounds = np.searchsorted(t.src, np.arange(0, RA.dims[n] + 1))
        start = 0
        while start < RA.dims[n]:
            # extend the chunk while the term count stays under the step
            stop = start + 1
            while stop < RA.dims[n] and bounds[stop + 1] - bounds[start] <= step:
                stop += 1
            W = np.zeros((rows, stop - start), dtype=np.int64)
            # a single generator with many terms is gathered in slices
            for lo in range(bounds[start], bounds[stop], step):
                hi = min(lo + step, bounds[stop])
                b = phi[lo:hi]
                idx = (np.arange(dimB)[:, None, None] * NB
                       + mul[inv[b]][None, :, :].transpose(0, 2, 1)).reshape(rows, hi - lo)
                gathered = Fprev[idx, t.gen[lo:hi][None, :]]
                S = sp.csr_matrix((t.coef[lo:hi], (np.arange(hi - lo), t.src[lo:hi] - start)),
                                  shape=(hi - lo, stop - start))
                W += np.asarray((S.T @ gathered.T).T)
            out[:, start:stop] = RB.lift(n - 1, W)
            start = stop
        return out

    def pullback(self, n, u):
        """Pull a degree-n cochain of RB back to RA."""
        return self.T[n].T @ np.asarray(u, dtype=np.int64)

    def verify(self, top=None):
        """Check d F = F d on all generators of degree 1..top (needs keep=True)."""
        top = max(self.F) if top is None else top
        RA, RB = self.source, self.target
        NB = RB.group.order
        for n in range(1, top + 1):
            if n not in self.F:
                return False
            lhs = RB.apply_boundary(n, self.F[n]) if n >= 1 else None
            t = RA.terms(n)
            rhs = np.zeros_like(lhs)
            dimB = RB.dims[n - 1]
            for s, c, j, a in zip(t.src, t.coef, t.gen, t.elt):
                b = self.images[a]
                idx = (np.arange(dimB)[:, None] * NB + RB.group.mul[RB.group.inv[b]][None, :]).ravel()
                rhs[:, s] += c * self.F[n - 1][idx, j]
            if not (lhs == rhs).all():
                return False
        return True


def equivariant_chain_map(RA, RB, hom=None, top=None, keep=False):
    return EquivariantChainMap(RA, RB, hom, top=top, keep=keep)


def restrict_cocycle(z, k):
    """A cocycle of RG viewed on the restricted resolution of index k."""
    return np.repeat(np.asarray(z, dtype=np.int64), k)


def corestrict_cocycle(z, k):
    """Transfer of a cocycle on the restricted resolution of index k."""
    z = np.asarray(z, dtype=np.int64)
    if len(z) % k:
        raise ValueError("dimension mismatch: wrong subgroup resolution")
    return z.reshape(-1, k).sum(axis=1)


def restriction(v, data_G, data_H, chain_map=None):
    """res^G_H on classes.

    data_H may be built on the restricted resolution itself, or on any
    resolution RH of H together with a chain map RH -> restricted RG over
    the identity of H.
    """
    if data_G.degree != data_H.degree:
        raise ValueError("degree mismatch")
    n = data_G.degree
    RH = data_H.resolution
    z = data_G.class_to_cocycle(v)
    if RH is data_G.resolution:
        return data_H.cocycle_to_class(z)
    if isinstance(RH, res.RestrictedResolution) and RH.parent is data_G.resolution:
        return data_H.cocycle_to_class(restrict_cocycle(z, RH.index))
    if chain_map is None:
        raise ValueError("a chain map into the restricted resolution is required")
    k = chain_map.target.index
    return data_H.cocycle_to_class(chain_map.pullback(n, restrict_cocycle(z, k)))


def corestriction(v, data_H, data_G, chain_map=None):
    """Cores^G_H on classes by block sums over the transversal.

    data_H is built on restrict_to_subgroup(RG, H); alternatively pass a
    chain map from that restricted resolution to data_H's resolution.
    """
    if data_G.degree != data_H.degree:
        raise ValueError("degree mismatch")
    n = data_G.degree
    RH = data_H.resolution
    z = data_H.class_to_cocycle(v)
    if chain_map is not None:
        RH = chain_map.source
        z = chain_map.pullback(n, z)
    if not isinstance(RH, res.RestrictedResolution) or RH.parent is not data_G.resolution:
        if RH is data_G.resolution:
            return data_G.cocycle_to_class(z)
        raise ValueError("dimension mismatch: wrong subgroup resolution")
    return data_G.cocycle_to_class(corestrict_cocycle(z, RH.index))


# -- cup products --------------------------------------------------------------

class DiagonalApproximation:
    """A chain map R -> R (x) R over the diagonal g -> (g, g) of G into G x G."""

    def __init__(self, R, top=None):
        self.resolution = R
        top = R.length - 1 if top is None else top
        G = R.group
        self.product = res.tensor_product_resolution(R, R)
        diag = np.arange(G.order) * G.order + np.arange(G.order)
        self.chain_map = EquivariantChainMap(R, self.product, diag, top=top)

    def cross_cochain(self, p, u, q, w):
        """u x w as a cochain on the tensor product in degree p + q."""
        P = self.product
        n = p + q
        out = np.zeros(P.dims[n], dtype=np.int64)
        lo, hi = P.block(n, p)
        out[lo:hi] = np.outer(np.asarray(u, dtype=np.int64), np.asarray(w, dtype=np.int64)).ravel()
        return out

    def cup_cocycles(self, p, u, q, w):
        return self.chain_map.pullback(p + q, self.cross_cochain(p, u, q, w))


_diagonal_cache = {}


def diagonal_approximation(R):
    key = id(R)
    if key not in _diagonal_cache or _diagonal_cache[key].resolution is not R:
        _diagonal_cache[key] = DiagonalApproximation(R)
    return _diagonal_cache[key]


def cup_product(R, v, w, data_p, data_q, data_pq):
    """v cup w for classes v in H^p, w in H^q, returned in H^(p+q)."""
    p, q = data_p.degree, data_q.degree
    if p + q >= R.length:
        raise ValueError("degree overflow")
    D = diagonal_approximation(R)
    z = D.cup_cocycles(p, data_p.class_to_cocycle(v), q, data_q.class_to_cocycle(w))
    return data_pq.cocycle_to_class(z)


# -- characters of a subgroup and products of their Bocksteins -----------------

class AbelianizationCharacters:
    """The characters of H/[H,H] as maps into a standard abelian group.

    invariants m_1 | ... | m_r and coords[h] = (c_1, ..., c_r) with
    h -> c_i mod m_i the i-th basis character; standard[h] is the index of
    h's image in groups.abelian_group(invariants).
    """

    def __init__(self, K):
        D = K.derived_subgroup()
        Q, proj, _ = K.quotient(D.elements)
        invariants, gens = grp.abelian_basis(Q)
        self.invariants = invariants
        r = len(invariants)
        coords = np.zeros((Q.order, r), dtype=np.int64)
        # enumerate prod y_i^c_i
        vals = np.zeros(1, dtype=np.int64)
        cs = np.zeros((1, 0), dtype=np.int64)
        for m, y in zip(invariants, gens):
            pw = [0]
            for _ in range(m - 1):
                pw.append(int(Q.mul[pw[-1], y]))
            pw = np.asarray(pw)
            vals = Q.mul[vals[:, None], pw[None, :]].ravel()
            cs = np.concatenate([np.repeat(cs, m, axis=0), np.tile(np.arange(m), len(cs))[:, None]], axis=1)
        coords[vals] = cs
        self.coords = coords[proj]
        radix = np.ones(r, dtype=np.int64)
        for i in range(r - 2, -1, -1):
            radix[i] = radix[i + 1] * invariants[i + 1]
        self.standard = self.coords @ radix if r else np.zeros(K.order, dtype=np.int64)


def multidegree_index(R, degrees):
    """Generator index of a pure tensor in an abelian_resolution of norm resolutions."""
    degrees = list(degrees)
    if isinstance(R, res.NormResolution):
        if len(degrees) != 1:
            raise ValueError("multidegree length mismatch")
        return 0
    p = sum(degrees[:-1])
    n = p + degrees[-1]
    i = multidegree_index(R.RQ, degrees[:-1])
    return R.gen_index(n, p, i, 0)


def bockstein_products(R_sub, chars, degree=4, top=None):
    """Cocycles on R_sub of all products delta(chi_i) cup delta(chi_j), i <= j.

    R_sub is any resolution of the group the characters are defined on.
    Returns a list of ((i, j), cocycle).  The products are pulled back from
    the cross products in the tensor product of norm resolutions of the
    abelianization.
    """
    r = len(chars.invariants)
    if r == 0:
        return []
    A = res.abelian_resolution(chars.invariants, length=degree + 1)
    cm = EquivariantChainMap(R_sub, A, chars.standard, top=degree)
    out = []
    for i in range(r):
        for j in range(i, r):
            degs = [0] * r
            degs[i] += 2
            degs[j] += 2
            u = np.zeros(A.dims[degree], dtype=np.int64)
            u[multidegree_index(A, degs)] = 1
            out.append(((i, j), cm.pullback(degree, u)))
    return out
