"""Exact linear algebra over Z and Q.

Everything here works on tuples/lists of Python ints or Fractions; nothing
ever touches floating point.  Matrices are lists of row lists.  These are
small (rank <= 26 throughout the package), so clarity beats asymptotics.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def frac_mat(m):
    return [[Fraction(x) for x in row] for row in m]


def mat_mul(a, b):
    k = len(b)
    bt = list(zip(*b))
    return [[sum(row[t] * col[t] for t in range(k)) for col in bt] for row in a]


def mat_vec(m, v):
    return tuple(sum(row[j] * v[j] for j in range(len(v))) for row in m)


def vec_mat(v, m):
    n = len(m)
    return tuple(sum(v[i] * m[i][j] for i in range(n)) for j in range(len(m[0])))


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def transpose(m):
    return [list(row) for row in zip(*m)]


def dot(u, v):
    return sum(x * y for x, y in zip(u, v))


def pair(u, gram, v):
    """u . gram . v^T for row vectors, exact."""
    n = len(u)
    return sum(u[i] * s for i, s in enumerate(
        sum(gram[i][j] * v[j] for j in range(n)) for i in range(n)))


def gram_apply(gram, v):
    """The linear form <., v> as a coordinate row: gram . v^T."""
    n = len(v)
    return tuple(sum(gram[i][j] * v[j] for j in range(n)) for i in range(n))


def det_bareiss(m):
    """Exact determinant of an integer matrix (Bareiss elimination)."""
    a = [list(map(int, row)) for row in m]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


def rank(m):
    """Rank of a matrix with int/Fraction entries."""
    if not m:
        return 0
    a = frac_mat(m)
    rows, cols = len(a), len(a[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(r + 1, rows):
            if a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
        if r == rows:
            break
    return r


def rref(m):
    """Reduced row echelon form over Q; returns (rows, pivot columns).

    Zero rows are dropped, so the result is a canonical basis of the row
    space: usable as a hashable key for a rational subspace.
    """
    if not m:
        return [], []
    a = frac_mat(m)
    rows, cols = len(a), len(a[0])
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return [tuple(row) for row in a[:r]], pivots


def subspace_key(rows):
    """Canonical hashable key for the Q-span of the given rows."""
    basis, _ = rref(rows)
    return tuple(basis)


def in_span(v, rows):
    """Is v in the Q-span of rows?"""
    if not rows:
        return all(x == 0 for x in v)
    r = rank(rows)
    return rank(list(rows) + [list(v)]) == r


def solve(a, b):
    """Solve x . a = b for a row vector x over Q (a square, invertible)."""
    n = len(a)
    at = [[Fraction(a[i][j]) for i in range(n)] for j in range(n)]  # transpose
    bb = [Fraction(x) for x in b]
    for c in range(n):
        piv = next((i for i in range(c, n) if at[i][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        at[c], at[piv] = at[piv], at[c]
        bb[c], bb[piv] = bb[piv], bb[c]
        inv = 1 / at[c][c]
        at[c] = [x * inv for x in at[c]]
        bb[c] *= inv
        for i in range(n):
            if i != c and at[i][c] != 0:
                f = at[i][c]
                at[i] = [x - f * y for x, y in zip(at[i], at[c])]
                bb[i] -= f * bb[c]
    return tuple(bb)


def solve_general(a, b):
    """One solution x of x . a = b with a rectangular, or None if inconsistent."""
    m = len(a)
    cols = len(a[0])
    aug = [[Fraction(a[i][j]) for i in range(m)] for j in range(cols)]
    rhs = [Fraction(x) for x in b]
    x = [Fraction(0)] * m
    used = []
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, cols) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        rhs[r], rhs[piv] = rhs[piv], rhs[r]
        inv = 1 / aug[r][c]
        aug[r] = [v * inv for v in aug[r]]
        rhs[r] *= inv
        for i in range(cols):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [v - f * w for v, w in zip(aug[i], aug[r])]
                rhs[i] -= f * rhs[r]
        used.append(c)
        r += 1
    for i in range(r, cols):
        if rhs[i] != 0:
            return None
    for i, c in enumerate(used):
        x[c] = rhs[i]
    return tuple(x)


def inverse(a):
    n = len(a)
    aug = [[Fraction(a[i][j]) for j in range(n)]
           + [Fraction(1 if j == i else 0) for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return [row[n:] for row in aug]


def hnf(m):
    """Row-style Hermite normal form of an integer matrix.

    Returns (h, u) with u unimodular and u . m = h; h is in upper echelon
    form with positive pivots and entries above each pivot reduced.  Zero
    rows sink to the bottom.
    """
    a = [list(map(int, row)) for row in m]
    rows = len(a)
    cols = len(a[0]) if a else 0
    u = identity(rows)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        u[r], u[piv] = u[piv], u[r]
        for i in range(r + 1, rows):
            while a[i][c] != 0:
                q = a[r][c] // a[i][c]
                a[r] = [x - q * y for x, y in zip(a[r], a[i])]
                u[r] = [x - q * y for x, y in zip(u[r], u[i])]
                a[r], a[i] = a[i], a[r]
                u[r], u[i] = u[i], u[r]
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
            u[r] = [-x for x in u[r]]
        for i in range(r):
            q = a[i][c] // a[r][c]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                u[i] = [x - q * y for x, y in zip(u[i], u[r])]
        r += 1
    return a, u


def kernel_int(m):
    """Basis rows of the integer kernel {x in Z^rows : x . m = 0}."""
    rows = len(m)
    if rows == 0:
        return []
    h, u = hnf(m)
    return [u[i] for i in range(rows) if all(x == 0 for x in h[i])]


def snf(m):
    """Smith normal form: (d, u, v) with u . m . v = d, u and v unimodular,
    d diagonal with d[i][i] | d[i+1][i+1]."""
    a = [list(map(int, row)) for row in m]
    n = len(a)
    c = len(a[0]) if a else 0
    u = identity(n)
    v = identity(c)

    def add_row(i, j, q):
        a[i] = [x + q * y for x, y in zip(a[i], a[j])]
        u[i] = [x + q * y for x, y in zip(u[i], u[j])]

    def add_col(i, j, q):
        for row in a:
            row[i] += q * row[j]
        for row in v:
            row[i] += q * row[j]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(n, c):
        # smallest nonzero entry of the trailing block to the pivot slot
        best = None
        for i in range(t, n):
            for j in range(t, c):
                if a[i][j] != 0 and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        dirty = False
        for i in range(t + 1, n):
            if a[i][t] != 0:
                q = a[i][t] // a[t][t]
                add_row(i, t, -q)
                if a[i][t] != 0:
                    dirty = True
        for j in range(t + 1, c):
            if a[t][j] != 0:
                q = a[t][j] // a[t][t]
                add_col(j, t, -q)
                if a[t][j] != 0:
                    dirty = True
        if dirty:
            continue
        off = False
        for i in range(t + 1, n):
            for j in range(t + 1, c):
                if a[i][j] % a[t][t] != 0:
                    add_row(t, i, 1)
                    off = True
                    break
            if off:
                break
        if off:
            continue
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return a, u, v


def saturate(basis, n):
    """Basis of the saturation of the Z-span of `basis` (rows) inside Z^n."""
    if not basis:
        return []
    forms = kernel_int(transpose([list(b) for b in basis]))
    if not forms:
        return identity(n)
    return kernel_int(transpose(forms))


def primitive_vector(v):
    """Scale a rational row vector to a primitive integer vector, keeping direction."""
    fr = [Fraction(x) for x in v]
    if all(x == 0 for x in fr):
        return tuple(0 for _ in fr)
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return tuple(x // g for x in ints)


def common_denominator(v):
    den = 1
    for x in v:
        f = Fraction(x)
        den = den * f.denominator // gcd(den, f.denominator)
    return den


def nullspace_from_rref(rows, pivots, dim):
    """Primitive integer basis of {x : r . x = 0 for r in rref rows}."""
    free = [j for j in range(dim) if j not in pivots]
    out = []
    for j in free:
        v = [Fraction(0)] * dim
        v[j] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -rows[i][j]
        out.append(primitive_vector(v))
    return out


def reduce_mod_rref(vec, rows, pivots):
    """vec minus its projection onto the row space (using rref structure)."""
    v = [Fraction(x) for x in vec]
    for i, p in enumerate(pivots):
        c = v[p]
        if c:
            row = rows[i]
            v = [a - c * b for a, b in zip(v, row)]
    return v


def in_rowspace(vec, rows, pivots):
    return all(x == 0 for x in reduce_mod_rref(vec, rows, pivots))
