"""Exact LLL reduction working on Gram matrices.

We never have embeddings of our lattices into Euclidean space, only exact
integer Gram matrices, so this is the Gram-matrix variant: it returns a
unimodular transform u with u . g . u^T reduced.  All arithmetic is over Q.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DefinitenessError
from .linalg import identity, mat_mul, transpose

DELTA = Fraction(99, 100)


def lll_reduce(gram, delta=DELTA):
    """LLL-reduce a positive definite integer Gram matrix.

    Returns (reduced_gram, u) with u unimodular and reduced = u . gram . u^T.
    """
    n = len(gram)
    if n == 0:
        return [], []
    g = [[Fraction(x) for x in row] for row in gram]
    u = identity(n)

    # Gram-Schmidt data from the Gram matrix alone:
    # b_star_norm[i] = |b_i*|^2, mu[i][j] for j < i.
    mu = [[Fraction(0)] * n for _ in range(n)]
    bstar = [Fraction(0)] * n

    def compute_gs():
        for i in range(n):
            for j in range(i):
                s = g[i][j] - sum(mu[i][k] * mu[j][k] * bstar[k] for k in range(j))
                if bstar[j] == 0:
                    raise DefinitenessError("degenerate Gram matrix in LLL")
                mu[i][j] = s / bstar[j]
            bstar[i] = g[i][i] - sum(mu[i][k] ** 2 * bstar[k] for k in range(i))
            if bstar[i] <= 0:
                raise DefinitenessError("Gram matrix is not positive definite")

    def row_op(i, j, q):
        # b_i <- b_i - q b_j ; update u and g
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]
        for k in range(n):
            g[i][k] -= q * g[j][k]
        for k in range(n):
            g[k][i] -= q * g[k][j]

    def size_reduce(i, j):
        if abs(mu[i][j]) > Fraction(1, 2):
            q = round(mu[i][j])
            row_op(i, j, q)
            for k in range(j):
                mu[i][k] -= q * mu[j][k]
            mu[i][j] -= q

    compute_gs()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            size_reduce(k, j)
        if bstar[k] >= (delta - mu[k][k - 1] ** 2) * bstar[k - 1]:
            k += 1
        else:
            u[k], u[k - 1] = u[k - 1], u[k]
            g[k], g[k - 1] = g[k - 1], g[k]
            for row in g:
                row[k], row[k - 1] = row[k - 1], row[k]
            # recompute GS data from scratch; ranks here are tiny
            compute_gs()
            k = max(k - 1, 1)
    g_int = [[int(x) for x in row] for row in g]
    return g_int, u


def lll_gram(gram):
    """Convenience wrapper caching nothing: (reduced, u, u_inv_free) pair."""
    red, u = lll_reduce(gram)
    return red, u


def check_transform(gram, red, u):
    """u . gram . u^T == red, exactly."""
    return mat_mul(mat_mul(u, [list(r) for r in gram]), transpose(u)) == [list(r) for r in red]
