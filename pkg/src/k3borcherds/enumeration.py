"""Exact enumeration of lattice vectors under quadratic and linear constraints.

The kernel is a Fincke-Pohst branch-and-bound on an LLL-reduced positive
definite Gram matrix, done entirely in rational arithmetic.  Hyperbolic
queries (prescribed norm and pairings against a vector of positive norm)
are reduced to definite enumerations on an affine slice.

All functions return lists of integer coordinate tuples, sorted
lexicographically, and every returned vector is re-verified against its
defining constraints before being handed back.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import ceil, floor, isqrt

from .errors import ConeError, DefinitenessError, DimensionError
from .lll import lll_reduce
from .linalg import (
    common_denominator,
    gram_apply,
    inverse,
    kernel_int,
    mat_mul,
    pair,
    snf,
    solve,
    transpose,
    vec_mat,
)


def _floor_sqrt(x: Fraction) -> int:
    """floor(sqrt(x)) for a nonnegative rational x."""
    if x < 0:
        raise ValueError("negative radicand")
    return isqrt(x.numerator * x.denominator) // x.denominator


def _cholesky(gram):
    """Rational Cholesky data: Q(x) = sum_i d[i] * (x_i + sum_{j>i} m[i][j] x_j)^2."""
    n = len(gram)
    a = [[Fraction(x) for x in row] for row in gram]
    d = [Fraction(0)] * n
    m = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d[i] = a[i][i]
        if d[i] <= 0:
            raise DefinitenessError("Gram matrix is not positive definite")
        for j in range(i + 1, n):
            m[i][j] = a[i][j] / d[i]
        for k in range(i + 1, n):
            for l in range(k, n):
                a[k][l] -= a[i][k] * a[i][l] / d[i]
                a[l][k] = a[k][l]
    return d, m


@lru_cache(maxsize=None)
def _reduced(gram_key):
    gram = [list(row) for row in gram_key]
    red, u = lll_reduce(gram)
    d, m = _cholesky(red)
    uinv = inverse(u)
    return red, u, uinv, d, m


def fp_enumerate(gram, target, shift=None):
    """All integer x with (x + shift) . gram . (x + shift)^T == target.

    gram: positive definite symmetric integer matrix; target: rational >= 0;
    shift: rational row vector (None means 0).  The result is finite and
    complete; order is not specified here (callers sort).
    """
    n = len(gram)
    target = Fraction(target)
    if n == 0:
        return [()] if target == 0 else []
    if target < 0:
        return []
    key = tuple(tuple(int(x) for x in row) for row in gram)
    red, u, uinv, d, m = _reduced(key)
    if shift is None:
        s = [Fraction(0)] * n
    else:
        s = list(vec_mat([Fraction(x) for x in shift], uinv))
    results = []
    y = [0] * n

    def rec(level, budget):
        if level < 0:
            if budget == 0:
                results.append(tuple(y))
            return
        c = s[level] + sum(m[level][j] * (y[j] + s[j]) for j in range(level + 1, n))
        bound = budget / d[level]
        r = _floor_sqrt(bound)
        # integer window for y: |y + c| <= sqrt(bound); widen by 1 and test exactly
        lo = ceil(-c - r - 1)
        hi = floor(-c + r + 1)
        for val in range(lo, hi + 1):
            t = val + c
            q = d[level] * t * t
            if q <= budget:
                y[level] = val
                if level == 0:
                    if q == budget:
                        results.append(tuple(y))
                else:
                    rec(level - 1, budget - q)
        y[level] = 0

    rec(n - 1, target)
    # map back to original coordinates: x = y . u
    out = [vec_mat(v, u) for v in results]
    return [tuple(int(c) for c in x) for x in out]


def brute_force_short_vectors(gram, norm, shift=None, extra_margin=0):
    """Independent oracle: box scan with per-coordinate bounds from the dual Gram.

    For positive definite Q and x Q x^T = m, |x_i| <= sqrt(m * (Q^{-1})_{ii}).
    Only usable at small rank; exists to cross-check fp_enumerate.
    """
    import itertools

    n = len(gram)
    q = [[-int(x) for x in row] for row in gram]  # incoming gram is negative definite
    target = -int(norm)
    if target < 0:
        return []
    qinv = inverse(q)
    s = [Fraction(x) for x in shift] if shift is not None else [Fraction(0)] * n
    bounds = []
    for i in range(n):
        b = _floor_sqrt(Fraction(target) * qinv[i][i]) + 1 + extra_margin
        bounds.append(b)
    out = []
    for x in itertools.product(*[range(-b, b + 1) for b in bounds]):
        v = [Fraction(xi) + si for xi, si in zip(x, s)]
        if pair(v, q, v) == target:
            out.append(tuple(x))
    return sorted(out)


def _is_negative_definite(gram):
    try:
        _cholesky([[-x for x in row] for row in gram])
        return True
    except DefinitenessError:
        return False


def short_vectors(gram, norm, coset=None):
    """Complete sorted list of x (in coset + Z^n) with x . gram . x^T == norm.

    gram must be negative definite; norm <= 0.
    """
    if norm > 0:
        raise DefinitenessError("negative definite form cannot represent positive norm")
    if not _is_negative_definite(gram):
        raise DefinitenessError("Gram matrix is not negative definite")
    pos = [[-int(x) for x in row] for row in gram]
    res = fp_enumerate(pos, -Fraction(norm), shift=coset)
    res = sorted(res)
    for x in res:
        v = x if coset is None else [Fraction(a) + Fraction(b) for a, b in zip(x, coset)]
        assert pair(v, gram, v) == norm
    return res


class PairingSlice:
    """Prepared affine slice {x in shift + Z^n : <x, a_i> = p_i for all i}.

    Reduces norm queries on the slice to definite enumerations.  The kernel
    lattice, its Gram matrix and LLL reduction are computed once and reused
    across many pairing targets.
    """

    def __init__(self, gram, vectors, shift=None):
        self.gram = gram
        n = len(gram)
        self.n = n
        self.shift = [Fraction(x) for x in shift] if shift is not None else [Fraction(0)] * n
        forms = []
        self.dens = []
        for a in vectors:
            row = gram_apply(gram, [Fraction(x) for x in a])
            den = common_denominator(row)
            forms.append([int(Fraction(x) * den) for x in row])
            self.dens.append(den)
        self.forms = forms  # integer columns-to-be
        m = transpose(forms)  # n x k integer matrix; x . m = pairings (scaled)
        self.m = m
        self.kernel = kernel_int(m)
        d, u, v = snf(m)
        self.snf_d, self.snf_u, self.snf_v = d, u, v
        if self.kernel:
            gk = mat_mul(mat_mul(self.kernel, [list(r) for r in gram]), transpose(self.kernel))
            self.gram_k = [[int(x) for x in row] for row in gk]
        else:
            self.gram_k = []

    def _particular(self, targets):
        """Integer k with k . m = scaled targets minus shift part, or None."""
        t = []
        for i, p in enumerate(targets):
            resid = Fraction(p) * self.dens[i] - dotf(self.shift, self.forms[i])
            if resid.denominator != 1:
                return None
            t.append(int(resid))
        # y . d = t . v  with x = y . u
        tv = vec_mat(t, self.snf_v)
        nrows = len(self.snf_u)
        y = [0] * nrows
        k = min(nrows, len(tv))
        for i in range(k):
            di = self.snf_d[i][i] if i < len(self.snf_d) and i < len(self.snf_d[i]) else 0
            if di == 0:
                if tv[i] != 0:
                    return None
            else:
                if tv[i] % di != 0:
                    return None
                y[i] = tv[i] // di
        for i in range(k, len(tv)):
            if tv[i] != 0:
                return None
        return vec_mat(y, self.snf_u)

    def solve(self, targets, norm):
        """All x in the slice with x . gram . x^T == norm, as exact rational tuples."""
        k0 = self._particular(targets)
        if k0 is None:
            return []
        s0 = [Fraction(a) + b for a, b in zip(k0, self.shift)]
        if not self.kernel:
            if pair(s0, self.gram, s0) == norm:
                return [tuple(s0)]
            return []
        gk = self.gram_k
        b = self.kernel
        rhs = [pair(row, self.gram, s0) for row in b]
        w = solve(gk, rhs)
        t = Fraction(norm) - pair(s0, self.gram, s0) + pair(w, gk, w)
        neg = [[-x for x in row] for row in gk]
        try:
            zs = fp_enumerate(neg, -t, shift=w)
        except DefinitenessError:
            raise ConeError("slice is not definite; base vector not in the positive cone")
        out = []
        for z in zs:
            x = tuple(s0[j] + sum(Fraction(z[i]) * b[i][j] for i in range(len(b)))
                      for j in range(self.n))
            assert pair(x, self.gram, x) == norm
            out.append(x)
        return sorted(out)


def dotf(u, v):
    return sum(Fraction(a) * Fraction(b) for a, b in zip(u, v))


def roots_with_pairing(gram, a, norm, pairing, shift=None):
    """All r (in shift + Z^n) with <r,r> = norm and <r,a> = pairing.

    Requires <a,a> > 0 so that the slice orthogonal to a is definite.
    """
    if pair(a, gram, a) <= 0:
        raise ConeError("base vector must have positive square-norm")
    sl = PairingSlice(gram, [a], shift=shift)
    return sl.solve([pairing], norm)


def orthogonal_roots(gram, v, shift=None, norm=-2):
    """[v]-perp roots: all r with <r,r> = norm, <r,v> = 0."""
    return roots_with_pairing(gram, v, norm, 0, shift=shift)


def separating_roots(gram, v, vp, shift=None, norm=-2):
    """Complete list of r with <r,r> = norm, <v,r> > 0, <vp,r> < 0.

    v, vp must lie in a common positive cone: <v,v> > 0, <vp,vp> > 0,
    <v,vp> > 0.  Finiteness comes from the definite complement of their span.
    """
    a = pair(v, gram, v)
    b = pair(vp, gram, vp)
    c = pair(v, gram, vp)
    if a <= 0 or b <= 0 or c <= 0:
        raise ConeError("vectors are not in a common positive cone")
    disc = a * b - c * c
    if disc >= 0:
        # equality in reversed Cauchy-Schwarz <=> proportional: no separators
        return []
    sl = PairingSlice(gram, [v, vp], shift=shift)
    dv = sl.dens[0]
    dvp = sl.dens[1]
    # region: b s^2 - 2 c s t + a t^2 <= -2 * disc, s > 0, t < 0
    rhs = Fraction(-norm) * (-disc)
    out = []
    smax = _floor_sqrt(rhs / b * dv * dv) + 1
    for sv in range(1, smax + 1):
        s = Fraction(sv, dv)
        if b * s * s > rhs:
            continue
        tmax = _floor_sqrt(rhs / a * dvp * dvp) + 1
        for tv in range(1, tmax + 1):
            t = Fraction(-tv, dvp)
            if b * s * s - 2 * c * s * t + a * t * t > rhs:
                break
            out.extend(sl.solve([s, t], norm))
    return sorted(out)
