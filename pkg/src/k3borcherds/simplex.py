"""Exact rational linear programming for redundancy and relative-interior tests.

The one question every caller asks: given linear forms (coordinate rows),
does {x : e.x = 0 for the equalities, f.x >= 0 for the inequalities} contain
a point with all inequalities strict, on the section {norm.x = 1}?  We answer
by maximizing the common margin t; the answer is "yes" iff the maximum is
positive.

Equalities are eliminated up front (the query subspace is usually shared by
many queries), and the margin LP is solved on its dual, which here has only
dim+1 rows, with integer ("Edmonds") pivoting: the tableau stays an integer
matrix divided by the determinant of the current basis, so every division is
exact and no tolerance exists anywhere.  A numpy presolve short-circuits the
common strictly-feasible case, but a presolve answer is only believed after
an exact rational witness has been checked.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import ConsistencyError
from .linalg import rref, solve_general

_BIG = Fraction(10) ** 9  # margin reported when no inequality binds


def _nullspace_exact(eq_rows, dim):
    """Rational basis (rows) of {x : e.x = 0 for e in eq_rows}."""
    if not eq_rows:
        return [tuple(Fraction(1 if j == i else 0) for j in range(dim)) for i in range(dim)]
    basis, pivots = rref(eq_rows)
    free = [j for j in range(dim) if j not in pivots]
    out = []
    for j in free:
        v = [Fraction(0)] * dim
        v[j] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -basis[i][j]
        out.append(tuple(v))
    return out


def _scale_int(row):
    den = 1
    fr = [Fraction(x) for x in row]
    for x in fr:
        den = den * x.denominator // _gcd(den, x.denominator)
    return [int(x * den) for x in fr], den


def _gcd(a, b):
    from math import gcd
    return gcd(a, b)


class _IntTableau:
    """Simplex tableau over Z with a scalar denominator (integer pivoting)."""

    def __init__(self, rows, rhs, obj):
        # rows: list of integer lists; rhs: ints; obj: ints (phase-2 costs)
        self.m = len(rows)
        self.n = len(rows[0]) if rows else 0
        self.t = [list(r) + [b] for r, b in zip(rows, rhs)]
        self.obj = list(obj) + [0]
        self.den = 1
        self.basis = [-1] * self.m

    def pivot(self, r, c):
        t = self.t
        prc = t[r][c]
        assert prc != 0
        den = self.den
        for i in range(self.m):
            if i == r:
                continue
            ti = t[i]
            tic = ti[c]
            tr = t[r]
            if tic == 0:
                if prc != den:
                    for j in range(self.n + 1):
                        ti[j] = ti[j] * prc // den
                continue
            for j in range(self.n + 1):
                ti[j] = (ti[j] * prc - tic * tr[j]) // den
        o = self.obj
        oc = o[c]
        if oc == 0:
            if prc != den:
                for j in range(self.n + 1):
                    o[j] = o[j] * prc // den
        else:
            tr = t[r]
            for j in range(self.n + 1):
                o[j] = (o[j] * prc - oc * tr[j]) // den
        self.den = prc
        self.basis[r] = c
        if self.den < 0:
            # keep denominator positive: negate everything
            self.den = -self.den
            for i in range(self.m):
                t[i] = [-x for x in t[i]]
            self.obj = [-x for x in self.obj]
            # note: row signs flip rhs too; basis values stay consistent

    def run(self, allowed_cols):
        """Phase run minimizing the current objective row.

        Dantzig pricing for speed, switching to Bland's rule after a while so
        termination is guaranteed even on degenerate problems.
        """
        guard = 0
        while True:
            guard += 1
            if guard > 100000:
                raise ConsistencyError("simplex failed to terminate")
            entering = None
            if guard <= 200:
                best = 0
                for j in allowed_cols:
                    v = self.obj[j]
                    if v < best:
                        best = v
                        entering = j
            else:
                for j in allowed_cols:
                    if self.obj[j] < 0:
                        entering = j
                        break
            if entering is None:
                return "optimal"
            leaving = None
            bn = bd = None
            for i in range(self.m):
                a = self.t[i][entering]
                if a > 0:
                    num = self.t[i][self.n]
                    if leaving is None or num * bd < bn * a or \
                            (num * bd == bn * a and self.basis[i] < self.basis[leaving]):
                        leaving, bn, bd = i, num, a
            if leaving is None:
                return "unbounded"
            self.pivot(leaving, entering)

    def value(self, col):
        for i in range(self.m):
            if self.basis[i] == col:
                return Fraction(self.t[i][self.n], self.den)
        return Fraction(0)


def _dual_margin(forms, norm_row):
    """Exact max t with f.x >= t for all f, norm.x = 1 (full-dimensional coords).

    Returns (t, x) where x attains the optimum (read off the artificial
    columns of the optimal dual tableau).  t may be +infinity-like _BIG when
    no inequality binds, or None when the section is empty.
    """
    m = len(forms)
    dim = len(norm_row)
    if m == 0:
        return _BIG, None
    # dual: min nu  st  sum_i y_i f_i = nu * norm,  sum y = 1,  y >= 0
    # standard form variables: y (m), nup, num; rows: dim + 1
    rows = []
    for d in range(dim):
        rows.append([int(f[d]) for f in forms] + [-int(norm_row[d]), int(norm_row[d])])
    rows.append([1] * m + [0, 0])
    rhs = [0] * dim + [1]
    nvars = m + 2
    # big-M free: two-phase with artificials
    art_cols = []
    full_rows = []
    for i, row in enumerate(rows):
        if rhs[i] < 0:
            row = [-x for x in row]
            rhs[i] = -rhs[i]
        full_rows.append(row)
    for i in range(len(full_rows)):
        col = [1 if j == i else 0 for j in range(len(full_rows))]
        art_cols.append(col)
    ncols = nvars + len(full_rows)
    tab_rows = [full_rows[i] + [art_cols[j][i] for j in range(len(full_rows))]
                for i in range(len(full_rows))]
    tab = _IntTableau(tab_rows, rhs, [0] * ncols)
    for i in range(tab.m):
        tab.basis[i] = nvars + i
    # phase 1 objective: sum of artificials, expressed via the rows
    ph1 = [0] * (ncols + 1)
    for i in range(tab.m):
        for j in range(ncols + 1):
            ph1[j] -= tab.t[i][j]
    for i in range(tab.m):
        ph1[nvars + i] += tab.den  # cost 1 on artificials (scaled by den=1)
    tab.obj = ph1
    tab.run(range(nvars))
    feas_num = -tab.obj[ncols]
    if feas_num != 0:
        # sum of artificials positive: dual infeasible => no inequality binds
        return _BIG, None
    # pivot artificials out where possible
    for i in range(tab.m):
        if tab.basis[i] >= nvars:
            col = next((j for j in range(nvars) if tab.t[i][j] != 0), None)
            if col is not None:
                tab.pivot(i, col)
    # phase 2: minimize nu = nup - num
    obj = [0] * (ncols + 1)
    obj[m] = 1
    obj[m + 1] = -1
    # express through current basis: subtract basic rows
    obj = [x * tab.den for x in obj]
    for i in range(tab.m):
        b = tab.basis[i]
        coef = obj[b]
        if coef != 0:
            obj = [x - coef * y // tab.den for x, y in zip(obj, tab.t[i])]
    tab.obj = obj
    status = tab.run(range(nvars))
    if status == "unbounded":
        return None, None  # primal (margin problem) infeasible
    nu = tab.value(m) - tab.value(m + 1)
    # primal solution: multipliers of the dual's equality rows, read from the
    # reduced costs over the artificial (initial identity) columns
    pi = [Fraction(-tab.obj[nvars + d], tab.den) for d in range(dim)]
    return nu, pi


def margin_and_witness(ineq_rows, eq_rows, norm_row, want_witness=True,
                       nullspace=None):
    """Exact max margin t and (if t > 0 and requested) a strict witness.

    Inequality rows that vanish identically on the equality subspace are
    dropped: the caller is expected to have excluded forms lying in the span
    of the equalities.  A precomputed integer basis of the equality nullspace
    may be passed to avoid recomputing it per query.  Returns
    (t, witness_or_None); t is None when the section {eq = 0, norm = 1} is
    empty.
    """
    dim = len(norm_row)
    z = nullspace if nullspace is not None else _nullspace_exact(eq_rows, dim)
    if not z:
        return None, None
    all_int = all(isinstance(x, int) for zr in z for x in zr)

    def project(f):
        if all_int and all(isinstance(x, int) for x in f):
            return [sum(f[i] * zr[i] for i in range(dim)) for zr in z]
        return [sum(Fraction(f[i]) * zr[i] for i in range(dim)) for zr in z]

    red_norm = project(norm_row)
    if all(x == 0 for x in red_norm):
        return None, None
    red_forms = []
    kept = []
    for f in ineq_rows:
        rf = project(f)
        if any(x != 0 for x in rf):
            if all(isinstance(x, int) for x in rf):
                red_forms.append(rf)
            else:
                red_forms.append(_scale_int(rf)[0])
            kept.append(f)
    if all(isinstance(x, int) for x in red_norm):
        red_norm_i, norm_den = red_norm, 1
    else:
        red_norm_i, norm_den = _scale_int(red_norm)

    witness = None
    if want_witness:
        witness = _float_witness(red_forms, red_norm_i, z, kept, eq_rows, norm_row)
        if witness is not None:
            return _exact_min_margin(witness, kept), witness

    t, pi = _dual_margin(red_forms, red_norm_i)
    if t is None:
        return None, None
    if t <= 0 or not want_witness:
        return t, None
    if pi is None:
        # no inequality binds: any section point is a witness
        x = _lift(z, [norm_den * v for v in _any_section_point(red_norm_i)])
    else:
        # the dual multipliers are the negated primal optimum
        x = _lift(z, [-norm_den * v for v in pi])
    if not _verify(x, kept, eq_rows, norm_row):
        raise ConsistencyError("recovered optimum fails verification")
    return t, x


def relint_point(ineq_rows, eq_rows, norm_row):
    """A rational point of the section with every inequality strictly positive,
    or None when no such point exists."""
    t, w = margin_and_witness(ineq_rows, eq_rows, norm_row)
    if t is None or t <= 0:
        return None
    if w is None:
        raise ConsistencyError("positive margin but witness recovery failed")
    return w


def _any_section_point(red_norm):
    d = len(red_norm)
    j = next(i for i in range(d) if red_norm[i] != 0)
    pt = [Fraction(0)] * d
    pt[j] = Fraction(1, red_norm[j])
    return pt


def _exact_min_margin(witness, ineq_rows):
    vals = [sum(Fraction(f[i]) * witness[i] for i in range(len(witness)))
            for f in ineq_rows]
    return min(vals) if vals else _BIG


def _lift(zrows, y):
    dim = len(zrows[0])
    return tuple(sum(Fraction(y[k]) * zrows[k][i] for k in range(len(zrows)))
                 for i in range(dim))


def _verify(x, ineq_rows, eq_rows, norm_row):
    dim = len(norm_row)
    if sum(Fraction(norm_row[i]) * x[i] for i in range(dim)) != 1:
        return False
    for e in eq_rows:
        if sum(Fraction(e[i]) * x[i] for i in range(dim)) != 0:
            return False
    for f in ineq_rows:
        if sum(Fraction(f[i]) * x[i] for i in range(dim)) <= 0:
            return False
    return True


def _float_witness(red_forms, red_norm, zrows, ineq_rows, eq_rows, norm_row):
    d = len(red_norm)
    if d == 0:
        return None
    a = np.array([[float(v) for v in f] for f in red_forms], dtype=float)
    nrm = np.array([float(v) for v in red_norm])
    nn = nrm / (nrm @ nrm)
    y = nn.copy()
    if len(a) == 0:
        x = _lift(zrows, [Fraction(v).limit_denominator(10 ** 9) for v in y])
        return x if _verify(x, ineq_rows, eq_rows, norm_row) else None
    an = a / np.maximum(np.linalg.norm(a, axis=1), 1e-300)[:, None]
    proj = np.eye(d) - np.outer(nn, nrm)  # projector onto {norm.y = 0} directions
    step = 1.0
    for it in range(300):
        margins = an @ y
        worst = int(np.argmin(margins))
        if margins[worst] > 1e-6 and it > 10:
            break
        g = proj @ an[worst]
        gn = np.linalg.norm(g)
        if gn < 1e-13:
            break
        y = y + (step / gn) * g
        step *= 0.985
        y = y - nn * (nrm @ y - 1.0)
    if (an @ y).min() <= 1e-9:
        return None
    for dens in (10 ** 8, 10 ** 14):
        y_rat = [Fraction(float(v)).limit_denominator(dens) for v in y]
        # exact re-normalization on the section
        s = sum(Fraction(red_norm[i]) * y_rat[i] for i in range(d))
        if s == 0:
            continue
        y_rat = [v / s for v in y_rat]
        x = _lift(zrows, y_rat)
        if _verify(x, ineq_rows, eq_rows, norm_row):
            return x
    return None


