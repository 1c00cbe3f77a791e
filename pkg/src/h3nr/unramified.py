"""Residue maps on H^4(G, Z), unramified classes and the Bogomolov multiplier.

For a pair (H, g) with H = Z_G(g) and I = <g> of order m, the residue of a
class v in H^4(G, Z) is computed on the resolution RH (x) Norm(m) of H x I:
pull v back along (h, g^k) -> h g^k, remove the part restricted from I
alone, write the result as the coboundary of a rational 3-cochain living on
the (3,0) and (2,1) blocks, and push the (2,1) block back to an integer
3-cocycle of H.
"""

import numpy as np

from . import groups as grp
from . import maps
from . import resolutions as res
from . import zmatrix
from .cohomology import ClassVector, CohomologyData, shift_qz_to_z, shift_z_to_qz
from .negligible import SubgroupOfH4, h4n, h4p

EXHAUSTIVE_BOUND = 3 ** 6


class ResidueError(RuntimeError):
    """The rational prefix solve failed; the block conventions are inconsistent."""


class ResiduePair:
    """A centralizer H = Z_G(<g>) together with the central element g."""

    def __init__(self, G, g, H=None):
        self.group = G
        self.g = int(g)
        self.H = G.centralizer([self.g]) if H is None else H
        self.order = G.element_order(self.g)

    def __repr__(self):
        return f"ResiduePair(|H|={self.H.order}, g={self.g}, |g|={self.order})"

    def cyclic(self):
        return self.group.subgroup(gens=[self.g])


def _h3_is_zero(G, H, cache):
    K, _ = H.as_group()
    return CohomologyData(cache.get(K), 3).order == 1


def _h4_all_negligible(G, H, cache):
    K, _ = H.as_group()
    RK = cache.get(K)
    return h4p(RK).is_everything()


def choose_hi_pairs(G, subgroup_filter=False, prune=True, cache=None):
    """Residue pairs, one per cyclic subgroup class, with redundant ones removed.

    Classes are visited from the largest down.  A kept class is dropped when
    H^3 of its centralizer vanishes (and, with subgroup_filter, when every
    class of H^4 of the centralizer is negligible); it then removes every
    smaller cyclic class having a conjugate inside it with the same
    centralizer.  With prune=False every nontrivial cyclic class is kept.
    """
    cache = res.default_cache if cache is None else cache
    classes = [I for I in G.cyclic_subgroup_classes() if I.order > 1]
    cents = [G.centralizer(I.elements) for I in classes]
    if not prune:
        return [ResiduePair(G, I.generators[0], C) for I, C in zip(classes, cents)]
    keep = [True] * len(classes)
    for ic in range(len(classes) - 1, -1, -1):
        if not keep[ic]:
            continue
        I, C = classes[ic], cents[ic]
        if _h3_is_zero(G, C, cache) or (subgroup_filter and _h4_all_negligible(G, C, cache)):
            keep[ic] = False
        for jc in range(ic):
            J0 = classes[jc]
            if not keep[jc] or I.order % J0.order or J0.order == I.order:
                continue
            for key, elems in G.conjugates(J0).items():
                if key & I.key != key:
                    continue
                if G.centralizer(elems) == C:
                    keep[jc] = False
                    break
    return [ResiduePair(G, I.generators[0], C) for I, C, k in zip(classes, cents, keep) if k]


class ResidueMap:
    """The residue at one pair as a matrix on the basis classes of H^4(G, Z)."""

    def __init__(self, RG, pair, data=None, cache=None):
        cache = res.default_cache if cache is None else cache
        G = RG.group
        self.pair = pair
        data = CohomologyData(RG, 4) if data is None else data
        self.data = data
        K, emb = pair.H.as_group()
        self.RH = cache.get(K)
        self.target = CohomologyData(self.RH, 3)
        m = pair.order
        RN = res.NormResolution(m, self.RH.length)
        P = res.tensor_product_resolution(self.RH, RN)
        powers = [0]
        for _ in range(m - 1):
            powers.append(int(G.mul[powers[-1], pair.g]))
        powers = np.asarray(powers, dtype=np.int64)
        # product index a * m + k  ->  emb[a] g^k
        images = G.mul[emb[:, None], powers[None, :]].ravel()
        self.product = P
        self.chain_map = maps.EquivariantChainMap(P, RG, images, top=4)
        self.rows = [self._residue_of_cocycle(data.class_to_cocycle(b)) for b in data.basis()]

    def _residue_of_cocycle(self, z):
        P, RH = self.product, self.RH
        w = self.chain_map.pullback(4, z)
        lo, hi = P.block(4, 0)
        w[lo:hi] = 0
        a0, a1 = P.block(3, 3)
        b0, b1 = P.block(3, 2)
        if not (a0 == 0 and a1 == b0):
            raise ResidueError("unexpected block layout in the product resolution")
        u = shift_z_to_qz(w, P, 4, cols=range(0, b1))
        if u is None:
            raise ResidueError("prefix solve failed for the residue cochain")
        z3 = shift_qz_to_z(u[b0:b1], RH, 3)
        return self.target.cocycle_to_class(z3)

    def __call__(self, v):
        out = self.target.zero()
        for c, r in zip(v.coefficients, self.rows):
            if c:
                out = out + c * r
        return out

    def of_cocycle(self, z):
        return self._residue_of_cocycle(np.asarray(z, dtype=np.int64))


_residue_maps = {}


def residue_map(RG, pair, data=None, cache=None):
    key = (id(RG), id(pair.group), pair.g, pair.H.key)
    rm = _residue_maps.get(key)
    if rm is None or rm.data.resolution is not RG:
        rm = ResidueMap(RG, pair, data=data, cache=cache)
        _residue_maps[key] = rm
    return rm


def residue(v, RG, pair, data=None):
    """The residue of v in H^3(H, Z) at the pair."""
    return residue_map(RG, pair, data=data)(v)


def is_unramified(v, RG, pairs=None, data=None, subgroup_filter=False):
    pairs = choose_hi_pairs(RG.group, subgroup_filter) if pairs is None else pairs
    for pair in pairs:
        if not residue(v, RG, pair, data=data).is_zero():
            return False
    return True


def _kernel_subgroup(data, maps_):
    """Subgroup of H^4 killed by every residue map (computed as a lattice kernel)."""
    tors = data.torsion_coefficients
    k = len(tors)
    if k == 0:
        return SubgroupOfH4(data)
    cols = []
    for rm in maps_:
        t = rm.target.torsion_coefficients
        for j, tj in enumerate(t):
            cols.append(([r.coefficients[j] for r in rm.rows], tj))
    if not cols:
        return SubgroupOfH4(data, data.basis())
    # x * A = 0 mod targets: stack diag(target torsion) under the class rows
    A = [[c[0][i] for c in cols] for i in range(k)]
    nc = len(cols)
    rel = [[tj if a == b else 0 for b in range(nc)] for a, (_, tj) in enumerate(cols)]
    ker = zmatrix.left_kernel(A + rel, nrows=k + nc)
    return SubgroupOfH4(data, [row[:k] for row in ker])


def h4nr(RG, P=None, data=None, pairs=None, mode="exhaustive", bound=EXHAUSTIVE_BOUND,
         fallback=True, subgroup_filter=False):
    """H4_nr(G, Z) as a SubgroupOfH4 containing H4_p.

    mode "exhaustive" tests one representative per coset of H^4/H4_p,
    "kernel" intersects the kernels of the residue matrices, and
    "generators" tests the Smith generators of H^4/H4_p one at a time and
    joins the unramified ones.  An exhaustive request above the bound uses
    the generator mode when fallback is allowed and raises otherwise.
    """
    G = RG.group
    data = CohomologyData(RG, 4) if data is None else data
    P = h4p(RG, data=data) if P is None else P
    if P.is_everything():
        return P
    pairs = choose_hi_pairs(G, subgroup_filter) if pairs is None else pairs
    rmaps = [residue_map(RG, pair, data=data) for pair in pairs]
    if mode == "kernel":
        return P.join(_kernel_subgroup(data, rmaps))
    if mode == "exhaustive" and P.index() > bound:
        if not fallback:
            raise ValueError(f"|H^4/H4_p| = {P.index()} exceeds the exhaustive bound {bound}")
        mode = "generators"
    if mode == "exhaustive":
        reps = P.coset_representatives()
    elif mode == "generators":
        reps = P.quotient_generators()
    else:
        raise ValueError(f"unknown mode {mode}")
    found = []
    for v in reps:
        if v.is_zero():
            continue
        if all(rm(v).is_zero() for rm in rmaps):
            found.append(v)
    return SubgroupOfH4(data, P.generators() + found)


def h3nr_of_function_field(RG, data=None, nr=None, n=None, **kw):
    """Abelian invariants of H4_nr / H4_n."""
    data = CohomologyData(RG, 4) if data is None else data
    n = h4n(RG, data=data) if n is None else n
    nr = h4nr(RG, P=n if RG.group.order % 2 else None, data=data, **kw) if nr is None else nr
    return nr.quotient_invariants(n)


def maximal_bicyclic_classes(G):
    """Abelian subgroup classes with at most two invariants, maximal up to conjugacy."""
    cands = [H for H in G.subgroup_classes()
             if G.is_abelian(H) and len(G.abelian_invariants(H)) <= 2]
    out = []
    for i, H in enumerate(cands):
        if not any(K.order > H.order and K.order % H.order == 0 and G._contains_conjugate(K, H)
                   for K in cands[i + 1:]):
            out.append(H)
    return out


def bogomolov_multiplier(G, RG, data=None):
    """Abelian invariants of the kernel of H^3(G, Z) -> prod H^3(A, Z) over bicyclic A."""
    data = CohomologyData(RG, 3) if data is None else data
    if data.order == 1:
        return []
    restrictions = []
    for A in maximal_bicyclic_classes(G):
        RA, iso = res.resolution_of_abelian_group(G, A.elements)
        cm = maps.EquivariantChainMap(RA, RG, iso, top=3)
        dA = CohomologyData(RA, 3)
        rows = [dA.cocycle_to_class(cm.pullback(3, data.class_to_cocycle(b))) for b in data.basis()]
        restrictions.append(_Rows(rows, dA))
    K = _kernel_subgroup(data, restrictions)
    return K.invariants()


class _Rows:
    def __init__(self, rows, target):
        self.rows = rows
        self.target = target
