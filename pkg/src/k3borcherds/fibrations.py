"""Elliptic fibrations from affine ADE configurations of rational curves.

An affine configuration yields a fiber class F (the primitive isotropic
positive combination of its members); the frame lattice [F, z]-perp then
carries everything the invariants need: its roots split into the reducible
fiber types, Shioda-Tate gives the Mordell-Weil rank, and the saturation
index of the root sublattice gives the torsion part.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DomainError, RecognitionError
from .enumeration import short_vectors
from .linalg import (
    hnf,
    kernel_int,
    mat_mul,
    pair,
    primitive_vector,
    rank,
    saturate,
    snf,
    solve_general,
    transpose,
)


def _components(adj, n):
    seen = [False] * n
    comps = []
    for i in range(n):
        if seen[i]:
            continue
        stack = [i]
        comp = []
        seen[i] = True
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in range(n):
                if not seen[y] and adj[x][y]:
                    seen[y] = True
                    stack.append(y)
        comps.append(sorted(comp))
    return comps


def detect_affine_ade(ctx, curves, check_curves=True):
    """Recognize a configuration whose components are affine ADE diagrams.

    Returns (types, fiber_class): the list of affine type names and the common
    primitive isotropic class sum(a_i C_i) with the standard multiplicities
    (computed as the positive primitive radical vector of each component).
    Raises RecognitionError when a component is not affine ADE or the
    components disagree about the fiber class.
    """
    curves = [tuple(int(x) for x in c) for c in curves]
    if check_curves:
        for c in curves:
            if not ctx.rational_curve_test(c):
                raise DomainError("configuration member is not a rational curve class")
    n = len(curves)
    gram = [[ctx.pair_s(a, b) for b in curves] for a in curves]
    adj = [[1 if i != j and gram[i][j] != 0 else 0 for j in range(n)] for i in range(n)]
    types = []
    fiber = None
    for comp in _components(adj, n):
        sub = [[gram[i][j] for j in comp] for i in comp]
        m = len(comp)
        ker = kernel_int(sub)
        if len(ker) != 1 or rank(sub) != m - 1:
            raise RecognitionError("component is not of affine (corank-1) type")
        marks = primitive_vector(ker[0])
        if all(x < 0 for x in marks):
            marks = tuple(-x for x in marks)
        if any(x <= 0 for x in marks):
            raise RecognitionError("component radical is not positive")
        f = tuple(sum(marks[k] * curves[comp[k]][j] for k in range(m)) for j in range(19))
        if ctx.pair_s(f, f) != 0:
            raise RecognitionError("fiber class is not isotropic")
        if fiber is None:
            fiber = f
        elif fiber != f:
            raise RecognitionError("components define different fiber classes")
        types.append(_affine_name(sub, marks))
    return sorted(types), fiber


def _affine_name(gram, marks):
    """Name the affine diagram by classifying the finite diagram left after
    deleting one mark-1 node."""
    m = len(gram)
    if m == 2 and gram[0][1] == 2:
        return "A1"
    drop = next(i for i in range(m) if marks[i] == 1)
    keep = [i for i in range(m) if i != drop]
    sub = [[gram[i][j] for j in keep] for i in keep]
    return _finite_name(sub)


def _finite_name(gram):
    """Classify a connected simply-laced Dynkin diagram given by its Gram."""
    n = len(gram)
    deg = [sum(1 for j in range(n) if j != i and gram[i][j] != 0) for i in range(n)]
    if any(gram[i][j] not in (0, 1) for i in range(n) for j in range(n) if i != j):
        raise RecognitionError("not a simply-laced diagram")
    forks = [i for i in range(n) if deg[i] == 3]
    if any(d > 3 for d in deg):
        raise RecognitionError("node of degree > 3")
    if not forks:
        return f"A{n}"
    if len(forks) > 1:
        raise RecognitionError("more than one fork")
    fork = forks[0]
    # arm lengths from the fork
    arms = []
    for start in [j for j in range(n) if gram[fork][j] != 0 and j != fork]:
        length = 1
        prev, cur = fork, start
        while True:
            nxt = [j for j in range(n) if j not in (prev,) and j != cur
                   and gram[cur][j] != 0]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            length += 1
        arms.append(length)
    arms.sort()
    if arms[0] == 1 and arms[1] == 1:
        return f"D{n}"
    if arms == [1, 2, 2]:
        return "E6"
    if arms == [1, 2, 3]:
        return "E7"
    if arms == [1, 2, 4]:
        return "E8"
    raise RecognitionError(f"unrecognized arm pattern {arms}")


ROOT_COUNTS = {}
for _n in range(1, 18):
    ROOT_COUNTS[("A", _n)] = _n * (_n + 1)
for _n in range(4, 18):
    ROOT_COUNTS[("D", _n)] = 2 * _n * (_n - 1)
ROOT_COUNTS[("E", 6)] = 72
ROOT_COUNTS[("E", 7)] = 126
ROOT_COUNTS[("E", 8)] = 240


def classify_root_system(gram_lattice, roots):
    """ADE types of the root system, via (rank, root count) per component."""
    n = len(roots)
    adj = [[1 if i != j and pair(roots[i], gram_lattice, roots[j]) != 0 else 0
            for j in range(n)] for i in range(n)]
    types = []
    comps = _components(adj, n)
    for comp in comps:
        vecs = [list(roots[i]) for i in comp]
        r = rank(vecs)
        count = len(comp)
        matches = [f"{fam}{rk}" for (fam, rk), cnt in ROOT_COUNTS.items()
                   if rk == r and cnt == count]
        if len(matches) != 1:
            raise RecognitionError(
                f"component with rank {r} and {count} roots is not simply-laced ADE")
        types.append(matches[0])
    return sorted(types), comps


def frame_invariants(ctx, fiber, section, check=True):
    """Reducible-fiber types and the Mordell-Weil rank/torsion of the
    Jacobian fibration with fiber class `fiber` and zero section `section`.

    frame = [F, z]-perp in the NS lattice; fiber types are the ADE types of
    its root system; MW rank by Shioda-Tate; torsion = primitive closure of
    the root sublattice modulo the root sublattice.
    """
    f = tuple(int(x) for x in fiber)
    z = tuple(int(x) for x in section)
    if ctx.pair_s(f, f) != 0 or ctx.pair_s(f, z) != 1:
        raise DomainError("need <F,F> = 0 and <F,z> = 1")
    forms = transpose([list(ctx.dual_form(f)), list(ctx.dual_form(z))])
    basis = kernel_int(forms)
    assert len(basis) == 17
    gram_frame = mat_mul(mat_mul(basis, ctx.gram), transpose(basis))
    gram_frame = [[int(x) for x in row] for row in gram_frame]
    roots = short_vectors(gram_frame, -2)
    types, comps = classify_root_system(gram_frame, roots)
    total_rank = sum(int(t[1:]) for t in types)
    mw_rank = 17 - total_rank
    torsion = _saturation_quotient(roots, 17)
    return {
        "fiber_types": types,
        "mw_rank": mw_rank,
        "mw_torsion": torsion,
        "frame_gram": gram_frame,
        "root_count": len(roots),
    }


def _saturation_quotient(roots, dim):
    """Invariant factors (> 1) of sat(span roots)/span(roots)."""
    if not roots:
        return []
    h, _ = hnf([list(r) for r in roots])
    basis = [row for row in h if any(row)]
    sat = saturate(basis, dim)
    # express basis in terms of sat
    coords = []
    for b in basis:
        sol = solve_general([list(s) for s in sat], b)
        coords.append([int(x) for x in sol])
    d, _, _ = snf(coords)
    out = [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))
           if d[i][i] > 1]
    return out


def section_pairings(ctx, fiber, curves):
    """<F, C> for each curve: 0 means fiber component, 1 means section."""
    return {tuple(c): ctx.pair_s(fiber, c) for c in curves}
