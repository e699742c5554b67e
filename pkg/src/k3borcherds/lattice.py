"""Exact arithmetic on even lattices.

A lattice is an integer Gram matrix with a label; vectors are exact rational
rows tagged by their home lattice; isometries are rational matrices acting on
row vectors from the right.  Discriminant forms, the induced action on them,
and discriminant-form gluing into an even unimodular overlattice live here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    ContainmentError,
    DimensionError,
    EvennessError,
    GlueError,
    NotAnIsometryError,
    SingularityError,
)
from .linalg import (
    common_denominator,
    det_bareiss,
    hnf,
    inverse,
    kernel_int,
    mat_mul,
    pair,
    rank,
    saturate,
    snf,
    solve_general,
    transpose,
)


class Lattice:
    """An even nondegenerate lattice given by its Gram matrix."""

    def __init__(self, gram, label=""):
        n = len(gram)
        for row in gram:
            if len(row) != n:
                raise DimensionError("Gram matrix must be square")
        for i in range(n):
            for j in range(n):
                if gram[i][j] != gram[j][i]:
                    raise DimensionError("Gram matrix must be symmetric")
                if int(gram[i][j]) != gram[i][j]:
                    raise DimensionError("Gram matrix must be integral")
        self.gram = tuple(tuple(int(x) for x in row) for row in gram)
        self.label = label
        self.rank = n
        self._det = None
        self._signature = None

    @property
    def det(self):
        if self._det is None:
            self._det = det_bareiss(self.gram)
            if self._det == 0:
                raise SingularityError(f"lattice {self.label!r} is degenerate")
        return self._det

    def is_even(self):
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    @property
    def signature(self):
        if self._signature is None:
            self._signature = signature(self)
        return self._signature

    def vector(self, coords, denominator_bound=1):
        return LatticeVector(tuple(Fraction(c) for c in coords), self, denominator_bound)

    def pairing(self, x, y):
        if len(x) != self.rank or len(y) != self.rank:
            raise DimensionError("vector length does not match lattice rank")
        return pair(x, self.gram, y)

    def norm(self, x):
        return self.pairing(x, x)

    def __repr__(self):
        return f"Lattice({self.label or self.rank})"


@dataclass(frozen=True)
class LatticeVector:
    """Exact rational row vector tagged by its home lattice."""

    coords: tuple
    home: Lattice
    denominator_bound: int = 1

    def __post_init__(self):
        if len(self.coords) != self.home.rank:
            raise DimensionError("coordinate length does not match lattice rank")
        for c in self.coords:
            if Fraction(c).denominator > self.denominator_bound or \
                    self.denominator_bound % Fraction(c).denominator != 0:
                raise DimensionError(
                    f"denominator of {c} does not divide the declared bound "
                    f"{self.denominator_bound}")


def inner_product(x: LatticeVector, y: LatticeVector) -> Fraction:
    """x . gram . y^T, exactly."""
    if x.home is not y.home:
        raise DimensionError("vectors live in different lattices")
    return Fraction(x.home.pairing(x.coords, y.coords))


@dataclass
class Isometry:
    """A Gram-preserving rational matrix acting on row vectors from the right."""

    matrix: tuple
    home: Lattice
    eta: int | None = None

    def __post_init__(self):
        g = [list(r) for r in self.home.gram]
        m = [list(r) for r in self.matrix]
        if mat_mul(mat_mul(m, g), transpose(m)) != g:
            raise NotAnIsometryError("matrix does not preserve the Gram form")
        for row in m:
            for x in row:
                if Fraction(x).denominator != 1:
                    raise NotAnIsometryError("matrix does not map the lattice into itself")
        self.matrix = tuple(tuple(int(x) for x in row) for row in m)

    def apply(self, v):
        n = self.home.rank
        return tuple(sum(v[i] * self.matrix[i][j] for i in range(n)) for j in range(n))


def signature(lat: Lattice):
    """Exact inertia (p, q) of the Gram matrix by rational symmetric reduction.

    Diagonal pivots are used when available; a nonzero off-diagonal entry is
    turned into a diagonal one by a symmetric row/column operation.
    """
    n = lat.rank
    a = [[Fraction(x) for x in row] for row in lat.gram]
    _ = lat.det  # raises SingularityError if degenerate
    p = q = 0
    idx = list(range(n))
    size = n
    while size > 0:
        piv = next((i for i in range(size) if a[i][i] != 0), None)
        if piv is None:
            # find off-diagonal nonzero and symmetrize: row/col i += row/col j
            found = None
            for i in range(size):
                for j in range(i + 1, size):
                    if a[i][j] != 0:
                        found = (i, j)
                        break
                if found:
                    break
            if found is None:
                raise SingularityError("degenerate block in signature reduction")
            i, j = found
            for k in range(size):
                a[i][k] += a[j][k]
            for k in range(size):
                a[k][i] += a[k][j]
            piv = i
        # move pivot to front
        if piv != 0:
            a[0], a[piv] = a[piv], a[0]
            for row in a:
                row[0], row[piv] = row[piv], row[0]
        d = a[0][0]
        if d > 0:
            p += 1
        else:
            q += 1
        # clear first row/column
        new = [[a[i][j] - a[i][0] * a[0][j] / d for j in range(1, size)]
               for i in range(1, size)]
        a = new
        size -= 1
    return (p, q)


@dataclass
class DiscriminantForm:
    """The finite quadratic form on dual/lattice with its generators.

    orders: cyclic orders of the Smith decomposition (nontrivial ones only).
    generators: dual-vector representatives (rational rows in lattice coords).
    q_values: q(gen) as Fractions mod 2Z, one per generator.
    pairing: pairing[i][j] = <gen_i, gen_j> mod Z.
    """

    orders: tuple
    generators: tuple
    q_values: tuple
    pairing: tuple

    @property
    def group_order(self):
        out = 1
        for d in self.orders:
            out *= d
        return out


def _mod_2z(x: Fraction) -> Fraction:
    r = Fraction(x) % 2
    return r


def _mod_z(x: Fraction) -> Fraction:
    return Fraction(x) % 1


def discriminant_form(lat: Lattice) -> DiscriminantForm:
    """Smith-normal-form decomposition of dual/lattice with q-values and pairings."""
    if not lat.is_even():
        raise EvennessError(f"lattice {lat.label!r} has an odd diagonal entry")
    g = [list(r) for r in lat.gram]
    d, u, v = snf(g)
    # columns of: dual basis is rows of gram^{-1}; dual/lattice = coker(gram).
    # With u . g . v = d, generators of coker are rows of (v^T applied to dual
    # basis): generator i = (1/d_i) * (row i of u) works since
    # (u g) = d v^{-1} has row i divisible by d_i.
    ginv = inverse(g)
    n = lat.rank
    orders = []
    gens = []
    for i in range(n):
        di = d[i][i]
        if di in (0, 1):
            continue
        # generator: (1/di) * (u[i] expressed in the dual basis) = u[i] . g^{-1} ... / 1
        # row u[i] of the transformed basis has u[i] . g = di * (row of v^{-1}),
        # so w := u[i] . g^{-1} ... we want a vector w in L tensor Q with
        # w in dual (integral pairings) of order di mod L: take w = u[i]/di? No:
        # u[i]/di has pairings u[i] . g / di = integral row; so it is dual.
        w = tuple(Fraction(x, di) for x in u[i])
        orders.append(di)
        gens.append(w)
    q_values = tuple(_mod_2z(pair(w, lat.gram, w)) for w in gens)
    pairing_tbl = tuple(tuple(_mod_z(pair(w1, lat.gram, w2)) for w2 in gens) for w1 in gens)
    disc = DiscriminantForm(tuple(orders), tuple(gens), q_values, pairing_tbl)
    assert disc.group_order == abs(lat.det)
    return disc


def disc_class_multiplier(lat: Lattice, probe, order: int, gen, x):
    """The k with [x] = k [gen] in a cyclic discriminant group of given order.

    probe: a lattice vector pairing to 1/order with gen (mod Z).  Returns k mod order.
    """
    val = _mod_z(pair(x, lat.gram, probe))
    k = val * order
    if k.denominator != 1:
        raise ContainmentError("vector is not in the span of the generator class")
    return int(k) % order


def eta_image(lat: Lattice, matrix, disc: DiscriminantForm) -> int:
    """Multiplier of an isometry on a cyclic discriminant group.

    For a cyclic group generated by gamma, returns the unit k with
    gamma^g = k * gamma in dual/lattice.
    """
    if len(disc.orders) != 1:
        raise DimensionError("eta is defined here for cyclic discriminant groups only")
    iso = Isometry(tuple(tuple(x for x in row) for row in matrix), lat)  # validates
    order = disc.orders[0]
    gamma = disc.generators[0]
    image = iso.apply(gamma)
    for k in range(order):
        diff = [Fraction(a) - k * Fraction(b) for a, b in zip(image, gamma)]
        if all(Fraction(x).denominator == 1 for x in diff):
            return k
    raise NotAnIsometryError("isometry does not act on the discriminant group")


def _std_basis(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _coprime(a, b):
    from math import gcd
    return gcd(a, b) == 1


def glue_overlattice(s: Lattice, r: Lattice, anti_images, s_disc=None, r_disc=None):
    """Even unimodular overlattice of s + r glued along an anti-isometry.

    anti_images: list of (gamma_s_dual_vector, gamma_r_dual_vector) pairs: the
    generators of the s discriminant group and their images.  Returns
    (overlattice, basis_rows, proj_s, proj_r) where basis_rows are rational
    rows in the orthogonal-sum coordinates (len = rank s + rank r).

    Raises GlueError when some q_s(gamma) + q_r(image) != 0 mod 2Z.
    """
    ns, nr = s.rank, r.rank
    n = ns + nr
    for gs, gr in anti_images:
        qs = _mod_2z(pair(gs, s.gram, gs))
        qr = _mod_2z(pair(gr, r.gram, gr))
        if _mod_2z(qs + qr) != 0:
            raise GlueError(
                f"glue map is not an anti-isometry: q-sum {qs} + {qr} != 0 mod 2Z")
    # generating set: standard bases of s and r plus the glue vectors
    gens = []
    for i in range(ns):
        gens.append([Fraction(1 if j == i else 0) for j in range(n)])
    for i in range(nr):
        gens.append([Fraction(1 if j == ns + i else 0) for j in range(n)])
    for gs, gr in anti_images:
        gens.append([Fraction(x) for x in gs] + [Fraction(x) for x in gr])
    den = 1
    for row in gens:
        den_row = common_denominator(row)
        den = den * den_row // _gcd(den, den_row)
    scaled = [[int(x * den) for x in row] for row in gens]
    h, _ = hnf(scaled)
    basis = [tuple(Fraction(x, den) for x in row) for row in h if any(row)]
    if len(basis) != n:
        raise GlueError("glue data does not generate a full-rank overlattice")
    big_gram = [[0] * n for _ in range(n)]
    for i in range(ns):
        for j in range(ns):
            big_gram[i][j] = s.gram[i][j]
    for i in range(nr):
        for j in range(nr):
            big_gram[ns + i][ns + j] = r.gram[i][j]
    gram_rows = mat_mul(mat_mul([list(b) for b in basis], big_gram),
                        transpose([list(b) for b in basis]))
    for i in range(n):
        for j in range(n):
            if Fraction(gram_rows[i][j]).denominator != 1:
                raise GlueError("glued lattice is not integral")
    over = Lattice([[int(x) for x in row] for row in gram_rows],
                   label=f"{s.label}+{r.label} glued")
    if not over.is_even():
        raise GlueError("glued overlattice is not even")
    if abs(over.det) != 1:
        raise GlueError(f"glued overlattice has |det| = {abs(over.det)}, not 1")
    proj_s = [[Fraction(1 if (i == j and i < ns) else 0) for j in range(n)] for i in range(n)]
    proj_r = [[Fraction(1 if (i == j and i >= ns) else 0) for j in range(n)] for i in range(n)]
    return over, basis, proj_s, proj_r


def _gcd(a, b):
    from math import gcd
    return gcd(a, b)


def orthogonal_complement(lat: Lattice, sub_basis, saturate_first=True):
    """Basis of {x in L : <x, m> = 0 for all m in sub}, plus the saturation of sub.

    Vectors are rows in lattice coordinates.  Raises ContainmentError when a
    given generator is not in the lattice.
    """
    n = lat.rank
    for v in sub_basis:
        if len(v) != n:
            raise ContainmentError("sublattice vector has wrong length")
        for x in v:
            if Fraction(x).denominator != 1:
                raise ContainmentError("sublattice vector is not in the lattice")
    if not sub_basis:
        return lat, [tuple(r) for r in _std_basis(n)], []
    forms = transpose([list(gram_apply_rows(lat.gram, v)) for v in sub_basis])
    comp = kernel_int(forms)
    sat = saturate([list(map(int, v)) for v in sub_basis], n) if saturate_first else \
        [list(map(int, v)) for v in sub_basis]
    assert len(comp) + rank([list(map(int, v)) for v in sub_basis]) == n
    comp_gram = mat_mul(mat_mul(comp, [list(r) for r in lat.gram]), transpose(comp)) \
        if comp else []
    comp_lat = Lattice([[int(x) for x in row] for row in comp_gram],
                       label=f"perp in {lat.label}") if comp else None
    return comp_lat, [tuple(c) for c in comp], [tuple(v) for v in sat]


def gram_apply_rows(gram, v):
    n = len(v)
    return tuple(sum(gram[i][j] * v[j] for j in range(n)) for i in range(n))
