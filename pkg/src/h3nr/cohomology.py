"""Integral cohomology from a free resolution.

Cochains on degree n are integer vectors with one entry per free generator
of the resolution (the value on that generator).  With M_n the trivialised
boundary matrix (rows: degree-n generators, columns: degree n-1), the
coboundary of a cochain u of degree n-1 is M_n @ u.
"""

from fractions import Fraction

import numpy as np

from . import zmatrix


class ClassVector:
    """A cohomology class in the torsion-coefficient basis of its CohomologyData."""

    __slots__ = ("coefficients", "torsion")

    def __init__(self, coefficients, torsion):
        torsion = tuple(int(t) for t in torsion)
        coefficients = [int(c) for c in coefficients]
        if len(coefficients) != len(torsion):
            raise ValueError("class vector length does not match the torsion coefficients")
        self.torsion = torsion
        self.coefficients = tuple(c % t for c, t in zip(coefficients, torsion))

    def __repr__(self):
        return f"ClassVector({list(self.coefficients)} mod {list(self.torsion)})"

    def __iter__(self):
        return iter(self.coefficients)

    def __len__(self):
        return len(self.coefficients)

    def _check(self, other):
        if self.torsion != other.torsion:
            raise ValueError("classes live in different groups")

    def __add__(self, other):
        self._check(other)
        return ClassVector([a + b for a, b in zip(self, other)], self.torsion)

    def __neg__(self):
        return ClassVector([-a for a in self], self.torsion)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k):
        return ClassVector([k * a for a in self], self.torsion)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, ClassVector) and self.torsion == other.torsion \
            and self.coefficients == other.coefficients

    def __hash__(self):
        return hash((self.coefficients, self.torsion))

    def is_zero(self):
        return not any(self.coefficients)

    def order(self):
        o = 1
        for c, t in zip(self.coefficients, self.torsion):
            k = t // np.gcd(c, t)
            o = o * k // np.gcd(o, k)
        return int(o)


class CohomologyData:
    """H^n(G, Z) of a resolution, with cocycle and coboundary bases.

    torsion_coefficients lists the invariants > 1 in divisibility order,
    free_rank the number of Z summands (zero for n >= 1).  A class vector
    has one coordinate per torsion coefficient.
    """

    def __init__(self, R, n):
        if not 0 <= n < R.length:
            raise ValueError("degree out of range")
        self.resolution = R
        self.degree = n
        d = R.dims
        Mnext = R.trivial_boundary(n + 1)
        self.cocycle_basis = zmatrix.left_kernel(Mnext.T.tolist(), nrows=d[n])
        k = len(self.cocycle_basis)
        self._zsolver = zmatrix.LeftSolver(self.cocycle_basis)
        if n >= 1:
            Mn = R.trivial_boundary(n)
            brows = Mn.T.tolist()
            beta = []
            for b in brows:
                x = self._zsolver.solve(b)
                if x is None:
                    raise RuntimeError("coboundary is not a cocycle; the resolution is broken")
                beta.append(x)
            self.coboundary_basis = zmatrix.lattice_basis(brows, ncols=d[n])
        else:
            beta = []
            self.coboundary_basis = []
        if k == 0:
            self._V = self._Vinv = []
            diag = []
        else:
            snf = zmatrix.smith_normal_form(beta, ncols=k)
            self._V = snf.coltrans
            self._Vinv = _inverse(snf.coltrans)
            diag = snf.diagonal() + [0] * (k - len(snf.diagonal()))
        self._tors_idx = [i for i, t in enumerate(diag) if t > 1]
        self.torsion_coefficients = [diag[i] for i in self._tors_idx]
        self.free_rank = sum(1 for t in diag if t == 0)

    def __repr__(self):
        return f"CohomologyData(degree={self.degree}, torsion={self.torsion_coefficients})"

    @property
    def order(self):
        o = 1
        for t in self.torsion_coefficients:
            o *= t
        return o

    def zero(self):
        return ClassVector([0] * len(self.torsion_coefficients), self.torsion_coefficients)

    def basis_class(self, i):
        c = [0] * len(self.torsion_coefficients)
        c[i] = 1
        return ClassVector(c, self.torsion_coefficients)

    def basis(self):
        return [self.basis_class(i) for i in range(len(self.torsion_coefficients))]

    def elements(self):
        """Iterate over every class (only sensible for small groups)."""
        import itertools
        for c in itertools.product(*[range(t) for t in self.torsion_coefficients]):
            yield ClassVector(c, self.torsion_coefficients)

    def class_vector(self, coefficients):
        return ClassVector(coefficients, self.torsion_coefficients)

    def is_cocycle(self, z):
        return self._zsolver.solve(z) is not None

    def cocycle_to_class(self, z):
        c = self._zsolver.solve([int(x) for x in z])
        if c is None:
            raise ValueError("not a cocycle")
        y = zmatrix.vecmat(c, self._V) if c else []
        return ClassVector([y[i] for i in self._tors_idx], self.torsion_coefficients)

    def class_to_cocycle(self, v):
        """An integer cocycle representing the class (as a numpy int64 vector)."""
        coeffs = list(v.coefficients) if isinstance(v, ClassVector) else [int(x) for x in v]
        if len(coeffs) != len(self._tors_idx):
            raise ValueError("class vector has the wrong length")
        k = len(self.cocycle_basis)
        y = [0] * k
        for i, c in zip(self._tors_idx, coeffs):
            y[i] = c
        c = zmatrix.vecmat(y, self._Vinv)
        z = zmatrix.vecmat(c, self.cocycle_basis) if k else [0] * self.resolution.dims[self.degree]
        return np.asarray(z, dtype=np.int64)


def _inverse(Q):
    n = len(Q)
    rows = [list(Q[i]) + [1 if i == j else 0 for j in range(n)] for i in range(n)]
    H = zmatrix.hermite_normal_form(rows)
    return [row[n:] for row in H]


def cocycles_and_coboundaries(R, n):
    return CohomologyData(R, n)


def _mod1(x):
    return x - (x.numerator // x.denominator)


def shift_z_to_qz(v, R, n, cols=None):
    """A Q/Z-valued (n-1)-cochain u with coboundary v, or None.

    v is an integer n-cocycle.  When cols is given the solution is
    supported on those generators of degree n-1 only.  Entries of u are
    Fractions reduced into [0, 1).
    """
    M = R.trivial_boundary(n)
    u = zmatrix.solve_left_rational([int(x) for x in v], M.T.tolist(), cols=cols)
    if u is None:
        return None
    return [_mod1(x) for x in u]


def shift_qz_to_z(u, R, n):
    """Integer n-cocycle M_n @ u for a rational (n-1)-cochain u."""
    M = R.trivial_boundary(n).tolist()
    u = [Fraction(x) for x in u]
    out = []
    for row in M:
        s = sum((a * x for a, x in zip(row, u) if a and x), Fraction(0))
        if s.denominator != 1:
            raise ValueError("non-integral coboundary; the cochain has the wrong denominators")
        out.append(int(s))
    return np.asarray(out, dtype=np.int64)
