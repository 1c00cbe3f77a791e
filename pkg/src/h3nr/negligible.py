"""Negligible classes in H^4(G, Z): the permutation part H4_p, H4_n and H3_s.

H4_p is spanned by corestrictions of products delta(chi) cup delta(psi) of
Bocksteins of characters chi, psi of subgroups H.  Only a pruned list of
subgroups is needed; see choose_subgroups_h4p and choose_subgroups_h1_trivial.
"""

import itertools

import numpy as np

from . import maps
from . import resolutions as res
from . import zmatrix
from .cohomology import ClassVector, CohomologyData


class RefusedError(Exception):
    """The requested invariant is not determined by the implemented theory."""


class SubgroupOfH4:
    """A subgroup of a finite abelian group H^n given in torsion coordinates.

    The subgroup is stored as the lattice L in Z^k spanned by its generators
    together with the rows of diag(torsion); the Hermite basis of L is
    canonical, so equality of subgroups is equality of bases.
    """

    def __init__(self, ambient, generators=()):
        self.ambient = ambient
        self.torsion = list(ambient.torsion_coefficients)
        k = len(self.torsion)
        rows = [[t if i == j else 0 for j in range(k)] for i, t in enumerate(self.torsion)]
        for g in generators:
            rows.append([int(x) for x in (g.coefficients if isinstance(g, ClassVector) else g)])
        self.basis = zmatrix.lattice_basis(rows, ncols=k) if k else []

    def __repr__(self):
        return f"SubgroupOfH4(invariants={self.invariants()}, in={self.torsion})"

    def invariants(self):
        """Abelian invariants of the subgroup itself."""
        return zmatrix.quotient_invariants(self.basis, self.torsion)

    def quotient_invariants(self, sub=None):
        """Invariants of H^n / (this subgroup), or of (this subgroup) / sub."""
        k = len(self.torsion)
        if sub is None:
            return [d for d in zmatrix.abelian_invariants_of_relations(self.basis, k) if d != 0]
        if not sub <= self:
            raise ValueError("not a subgroup")
        rels = [zmatrix.solve_left(row, self.basis) for row in sub.basis]
        return [d for d in zmatrix.abelian_invariants_of_relations(rels, len(self.basis)) if d != 0]

    @property
    def order(self):
        o = 1
        for d in self.invariants():
            o *= d
        return o

    def index(self):
        o = 1
        for d in self.quotient_invariants():
            o *= d
        return o

    def generators(self):
        """Nonzero classes among the basis rows."""
        out = []
        for row in self.basis:
            v = ClassVector(row, self.torsion)
            if not v.is_zero():
                out.append(v)
        return out

    def contains(self, v):
        if not self.torsion:
            return True
        coeffs = v.coefficients if isinstance(v, ClassVector) else v
        return zmatrix.solve_left([int(x) for x in coeffs], self.basis) is not None

    def __contains__(self, v):
        return self.contains(v)

    def __le__(self, other):
        if self.torsion != other.torsion:
            raise ValueError("subgroups of different groups")
        return all(other.contains(row) for row in self.basis)

    def __eq__(self, other):
        return isinstance(other, SubgroupOfH4) and self.torsion == other.torsion \
            and self.basis == other.basis

    def __hash__(self):
        return hash((tuple(self.torsion), tuple(map(tuple, self.basis))))

    def join(self, other):
        if self.torsion != other.torsion:
            raise ValueError("subgroups of different groups")
        return SubgroupOfH4(self.ambient, self.basis + other.basis)

    def is_everything(self):
        return self.index() == 1

    def _smith(self):
        k = len(self.torsion)
        snf = zmatrix.smith_normal_form(self.basis)
        diag = snf.diagonal() + [0] * (k - len(snf.diagonal()))
        return diag, _inverse(snf.coltrans)

    def coset_representatives(self):
        """One class vector per coset of H^n / (this subgroup)."""
        if not self.torsion:
            yield ClassVector([], [])
            return
        diag, Qinv = self._smith()
        for y in itertools.product(*[range(d) for d in diag]):
            yield ClassVector(zmatrix.vecmat(list(y), Qinv), self.torsion)

    def quotient_generators(self):
        """Classes whose images generate H^n / (this subgroup) in Smith form."""
        if not self.torsion:
            return []
        diag, Qinv = self._smith()
        return [ClassVector(Qinv[i], self.torsion) for i, d in enumerate(diag) if d > 1]


def _inverse(Q):
    n = len(Q)
    rows = [list(Q[i]) + [1 if i == j else 0 for j in range(n)] for i in range(n)]
    H = zmatrix.hermite_normal_form(rows)
    return [row[n:] for row in H]


# -- subgroup selection -----------------------------------------------------------

def choose_subgroups_h4p(G, prune=True):
    """Non-perfect subgroup classes, dropping H' < H with [H', H'] = [H, H].

    Classes are visited from the largest down; a kept class removes every
    smaller class having a conjugate inside it with the same derived
    subgroup.  With prune=False all non-perfect classes are returned.
    """
    classes = G.subgroup_classes()
    derived = [G.derived_subgroup(H) for H in classes]
    keep = [D.order != H.order for H, D in zip(classes, derived)]
    if not prune:
        return [H for H, k in zip(classes, keep) if k]
    for ic in range(len(classes) - 1, 0, -1):
        if not keep[ic]:
            continue
        H, DH = classes[ic], derived[ic]
        for jc in range(ic):
            K = classes[jc]
            if K.order >= H.order or H.order % K.order:
                continue
            if derived[jc].order != DH.order:
                continue
            for key, elems in G.conjugates(K).items():
                if key & H.key != key:
                    continue
                J = G.subgroup(elements=elems)
                if G.derived_subgroup(J) == DH:
                    keep[jc] = False
                    break
    return [H for H, k in zip(classes, keep) if k]


def _transfer_kernel(G, H, DH, K, ker_flags):
    """Elements of K (flagged) whose transfer-like image in H/[H,H] vanishes
    for every double coset H g K."""
    mul, inv = G.mul, G.inv
    inH = np.zeros(G.order, dtype=bool)
    inH[H.elements] = True
    inD = np.zeros(G.order, dtype=bool)
    inD[DH.elements] = True
    Hq, projH, _ = G.subgroup_as_group(H.elements)[0].quotient(np.searchsorted(H.elements, DH.elements))
    localH = -np.ones(G.order, dtype=np.int64)
    localH[H.elements] = np.arange(H.order)
    # right cosets H x: label each element by its coset
    T = G.right_transversal(H)
    cos = np.empty(G.order, dtype=np.int64)
    for c, t in enumerate(T):
        cos[mul[H.elements, t]] = c
    for dc in G.double_cosets(H, K):
        cosets = sorted(set(cos[dc].tolist()))
        reps = {c: int(T[c]) for c in cosets}
        for k in np.nonzero(ker_flags)[0]:
            k = int(k)
            seen = set()
            value = 0        # element of H/[H,H] (index in Hq)
            for c in cosets:
                if c in seen:
                    continue
                # orbit of the coset under right multiplication by k
                r = reps[c]
                length, x = 0, c
                while True:
                    seen.add(x)
                    length += 1
                    x = int(cos[mul[T[x], k]])
                    if x == c:
                        break
                kl = G.power(k, length)
                h = mul[mul[r, kl], inv[r]]
                value = Hq.mul[value, projH[localH[h]]]
            if value != 0:
                ker_flags[k] = False
    return ker_flags


def choose_subgroups_h1_trivial(G):
    """Subgroup classes kept by the double-coset transfer reduction.

    Classes are visited from the largest down.  For a kept H, every smaller
    kept class K has its running kernel (initially K) cut down by the maps
    K -> H/[H,H] attached to the double cosets H g K; K is dropped once the
    kernel has shrunk to [K, K].
    """
    classes = G.subgroup_classes()
    derived = [G.derived_subgroup(H) for H in classes]
    keep = [D.order != H.order for H, D in zip(classes, derived)]
    kernels = []
    for H in classes:
        flags = np.zeros(G.order, dtype=bool)
        flags[H.elements] = True
        kernels.append(flags)
    n = len(classes)
    for i in range(n - 1, 0, -1):
        if not keep[i]:
            continue
        H, DH = classes[i], derived[i]
        for j in range(1, i):
            if not keep[j]:
                continue
            kernels[j] = _transfer_kernel(G, H, DH, classes[j], kernels[j])
            if kernels[j].sum() == derived[j].order:
                keep[j] = False
    return [H for H, k in zip(classes, keep) if k]


# -- H4_p -------------------------------------------------------------------------

def subgroup_product_cocycles(RG, H, method="characters", cache=None):
    """Cocycles on RG of Cores^G_H(delta(chi_i) cup delta(chi_j)) for all i <= j."""
    G = RG.group
    if H.order == G.order:
        R_sub, k = RG, 1
    else:
        R_sub = res.restrict_to_subgroup(RG, H)
        k = R_sub.index
    if method == "characters":
        chars = maps.AbelianizationCharacters(R_sub.group)
        prods = [z for _, z in maps.bockstein_products(R_sub, chars)]
    elif method == "diagonal":
        cache = res.default_cache if cache is None else cache
        K = R_sub.group
        RH = RG if R_sub is RG else cache.get(K)
        C2 = CohomologyData(RH, 2)
        C4 = CohomologyData(RH, 4)
        D = maps.diagonal_approximation(RH)
        prods = []
        basis = C2.basis()
        for a in range(len(basis)):
            for b in range(a, len(basis)):
                prods.append(D.cup_cocycles(2, C2.class_to_cocycle(basis[a]), 2, C2.class_to_cocycle(basis[b])))
        if RH is not R_sub:
            cm = maps.EquivariantChainMap(R_sub, RH, None, top=4)
            prods = [cm.pullback(4, z) for z in prods]
    else:
        raise ValueError(f"unknown cup product method {method}")
    return [maps.corestrict_cocycle(z, k) for z in prods]


def h4p(RG, h1_trivial=False, data=None, subgroups=None, method="characters", prune=True):
    """H4_p(G, Z) as a SubgroupOfH4 of H^4(G, Z)."""
    G = RG.group
    data = CohomologyData(RG, 4) if data is None else data
    if subgroups is None:
        subgroups = choose_subgroups_h1_trivial(G) if h1_trivial else choose_subgroups_h4p(G, prune=prune)
    gens = []
    for H in subgroups:
        for z in subgroup_product_cocycles(RG, H, method=method):
            gens.append(data.cocycle_to_class(z))
    return SubgroupOfH4(data, gens)


def _sandwich_h4n(K, cache):
    """H4_n of a 2-group K when H4_p(K) = H4_nr(K) forces it; else refuse."""
    from .unramified import h4nr
    RK = cache.get(K)
    P = h4p(RK)
    if P.is_everything() or P == h4nr(RK, P=P):
        return P
    raise RefusedError("H4_n of a 2-group is not determined here")


def h4n_subgroups(G, cache=None, memo=None):
    """Subgroups of G whose Bockstein products, corestricted, span H4_n(G).

    Odd order: the H4_p subgroups.  Otherwise the H4_p subgroups of G
    together with (the images of) the H4_n subgroups of each maximal
    subgroup class.  A 2-group is refused at the top level; inside the
    recursion it is accepted when H4_p and H4_nr agree on it, which pins
    H4_n between them.
    """
    cache = res.default_cache if cache is None else cache
    memo = {} if memo is None else memo
    key = G.order, G.mul.tobytes()
    if key in memo:
        return memo[key]
    if G.order % 2 == 1:
        out = choose_subgroups_h4p(G)
    elif G.is_p_group():
        raise RefusedError("H4_n is not determined for 2-groups")
    else:
        out = list(choose_subgroups_h4p(G))
        for M in G.maximal_subgroup_classes():
            Mg, emb = M.as_group()
            if Mg.is_p_group() and Mg.order % 2 == 0:
                _sandwich_h4n(Mg, cache)
                sub = choose_subgroups_h4p(Mg)
            else:
                sub = h4n_subgroups(Mg, cache, memo)
            out.extend(G.subgroup(elements=emb[H.elements]) for H in sub)
        # one subgroup per conjugacy class
        seen, unique = set(), []
        for H in out:
            orbit = G.conjugates(H)
            k = min(orbit)
            if k not in seen:
                seen.add(k)
                unique.append(G.subgroup(elements=orbit[k]))
        out = unique
    memo[key] = out
    return out


def h4n(RG, data=None, cache=None):
    """H4_n(G, Z) as a SubgroupOfH4; raises RefusedError for 2-groups."""
    G = RG.group
    data = CohomologyData(RG, 4) if data is None else data
    if G.order % 2 == 1:
        return h4p(RG, data=data)
    return h4p(RG, data=data, subgroups=h4n_subgroups(G, cache))


def stable_cohomology_h3s(RG, data=None, N=None):
    """Abelian invariants of H^4(G, Z) / H4_n(G, Z)."""
    N = h4n(RG, data=data) if N is None else N
    return N.quotient_invariants()
