"""Generators and relations for the automorphism group.

The alphabet is the finite stabilizer of the base chamber together with all
adjacency cosets of the inner walls.  Trivial relations come from the group
structure of the stabilizer; face relations come from simple chamber loops
around the inner codimension-2 faces.  Every emitted relation is verified as
an exact matrix identity; arbitrary group elements are rewritten as words by
walking the segment from the base chamber to their image chamber.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    ConsistencyError,
    DomainError,
    InstanceMismatchError,
    MembershipError,
    SoundnessError,
)
from .linalg import identity, inverse, mat_mul, vec_mat


@dataclass
class Alphabet:
    """Gamma = stabilizer letters + one adjacency coset per inner wall."""

    g0: list                  # matrices of the chamber stabilizer
    adj: dict                 # inner wall form -> list of 16 matrices
    letters: list             # all matrices, in index order
    index: dict               # matrix -> letter index
    kind: list                # "g0" or the wall form, per letter

    @property
    def size(self):
        return len(self.letters)


def mat_id(n=19):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_prod(a, b):
    return tuple(tuple(int(x) for x in row)
                 for row in mat_mul([list(r) for r in a], [list(r) for r in b]))


def mat_inv(a):
    return tuple(tuple(int(x) for x in row) for row in inverse([list(r) for r in a]))


def build_alphabet(ctx, scan, lab):
    """Gamma with its index; verifies the inner-wall count and closure under
    inversion."""
    g0 = [tuple(tuple(int(x) for x in r) for r in g) for g in scan.aut_d0]
    inner_forms = [w.form for rec in scan.wall_orbits if rec.inner
                   for w in rec.members]
    if len(inner_forms) != 56:
        raise InstanceMismatchError(
            f"expected 56 inner walls, found {len(inner_forms)}")
    adj = {}
    for rec in scan.wall_orbits:
        if not rec.inner:
            continue
        for member in rec.members:
            h = lab._stabilizer_transporter(rec.rep, member)
            base = mat_prod(rec.generator, h)
            adj[member.form] = sorted(mat_prod(g, base) for g in g0)
            if len(set(adj[member.form])) != len(g0):
                raise ConsistencyError("adjacency coset has repeated elements")
    letters = list(g0)
    kind = ["g0"] * len(g0)
    for f in sorted(adj):
        letters.extend(adj[f])
        kind.extend([f] * len(adj[f]))
    index = {m: i for i, m in enumerate(letters)}
    if len(index) != len(letters):
        raise ConsistencyError("alphabet letters are not distinct")
    alpha = Alphabet(g0=g0, adj=adj, letters=letters, index=index, kind=kind)
    for m in letters:
        if mat_inv(m) not in index:
            raise ConsistencyError("alphabet is not closed under inversion")
    return alpha


def word_matrix(alpha, word):
    """m(u): the product of the letters of the word (leftmost first)."""
    out = mat_id()
    for idx in word:
        out = mat_prod(out, alpha.letters[idx])
    return out


def rel_triv(alpha):
    """The trivial relation families, as (word, word) pairs of index tuples.

    Families: [1] ~ empty; [gamma, gamma^-1] ~ [1]; [h, h'] ~ [hh'];
    [h, g] ~ [hg] for h, h' in the stabilizer and g an adjacency letter.
    """
    one = alpha.index[mat_id()]
    rels = [((one,), ())]
    for i, m in enumerate(alpha.letters):
        rels.append(((i, alpha.index[mat_inv(m)]), (one,)))
    n0 = len(alpha.g0)
    for i in range(n0):
        for j in range(n0):
            prod = mat_prod(alpha.letters[i], alpha.letters[j])
            rels.append(((i, j), (alpha.index[prod],)))
    for i in range(n0):
        for j in range(n0, alpha.size):
            prod = mat_prod(alpha.letters[i], alpha.letters[j])
            rels.append(((i, j), (alpha.index[prod],)))
    return rels


def rel_face_for(ctx, lab, alpha, face, seeds=None):
    """Face relations from the two simple chamber loops around an inner
    codimension-2 face.

    Words are built per the enumeration scheme for W(lambda): the canonical
    emission uses the identity stabilizer seed, one word per loop direction;
    the full family is recovered by stabilizer translation (sampled by the
    verifier).  Returns a list of (word, [m(word)]) relation pairs.
    """
    curves = lab.curves_through_face(face)
    if curves:
        raise DomainError("face relations require an inner face")
    ring = lab.ring_around(face)
    rels = []
    for reverse in (False, True):
        word = _loop_word(ctx, lab, alpha, face, reverse=reverse)
        m = word_matrix(alpha, word)
        if m not in alpha.index or alpha.kind[alpha.index[m]] != "g0":
            raise SoundnessError("loop word does not multiply into the stabilizer")
        rels.append((tuple(word), (alpha.index[m],)))
        for seed in (seeds or []):
            translated = tuple(word[:-1]) + (alpha.index[
                mat_prod(alpha.letters[word[-1]], seed)],)
            mm = word_matrix(alpha, translated)
            rels.append((translated, (alpha.index[mm],)))
    return rels


def _loop_word(ctx, lab, alpha, face, reverse=False):
    """A gh-form word read off one simple loop around the face.

    The loop visits chambers D0 = D(0), D(1), ..., D(n) = D0; the letter for
    step k is chosen in the adjacency coset of the wall crossed, following
    the path reconstruction scheme (seed h = identity)."""
    nrows_npiv = None
    from .linalg import in_rowspace, rref, transpose

    nrows, npiv = rref(face.normal_forms)
    walls0 = [f for f in lab.forms if in_rowspace(f, nrows, npiv)]
    start = walls0[1] if reverse else walls0[0]
    ident = mat_id()
    g = ident
    word = []
    exit_form = start
    a32 = tuple(ctx.a32)
    guard = 0
    while True:
        guard += 1
        if guard > 64:
            raise ConsistencyError("simple loop did not close")
        # wall of the current chamber D0^g over the face: its D0-preimage is
        # exit_form; the crossing letter is any element of Adj(exit_form)
        # right-translated by g: choose the coset representative with seed 1
        gprime = alpha.adj[exit_form][0]
        # letter moving D0^g across (exit_form)^g: candidates are
        # Adj(exit_form) * g ... the chamber path formalism wants letters
        # g_k with D(k) = D0^{g_k ... g_1}; here D(k) = D0^{g_new} with
        # g_new = gprime * g, so the new letter is gprime conjugated in the
        # left-quotient sense: g_k = g_new * g^{-1} * ... = gprime.
        word.insert(0, alpha.index[gprime])
        gnew = mat_prod(gprime, g)
        a_new = tuple(vec_mat(a32, [list(r) for r in gnew]))
        if a_new == a32:
            break
        gt = transpose([list(r) for r in gnew])
        pre = [tuple(vec_mat(f, gt)) for f in face.normal_forms]
        prows, ppiv = rref(pre)
        nxt = [f for f in lab.forms if in_rowspace(f, prows, ppiv)]
        chosen = None
        a_cur = tuple(vec_mat(a32, [list(r) for r in g]))
        for cand in nxt:
            gq = alpha.adj[cand][0]
            gback = mat_prod(gq, gnew)
            if tuple(vec_mat(a32, [list(r) for r in gback])) != a_cur:
                chosen = cand
        if chosen is None:
            raise ConsistencyError("loop has no forward exit")
        g = gnew
        exit_form = chosen
    word.append(alpha.index[mat_id()])
    return word


def verify_relations(alpha, rels):
    """Each pair must be an exact matrix identity; raises SoundnessError."""
    checked = 0
    for u, v in rels:
        if word_matrix(alpha, u) != word_matrix(alpha, v):
            raise SoundnessError(f"relation fails: {u} vs {v}")
        checked += 1
    return checked


def gh_normalize(alpha, word):
    """A gh-form word (adjacency letters then one stabilizer letter) that is
    trivial-relation equivalent to the input word.

    Pending stabilizer letters are pushed rightward through adjacency letters
    with the [h, g] ~ [hg] relations, which keep each adjacency coset stable
    under left translation."""
    out = []
    pending = mat_id()
    for idx in word:
        if alpha.kind[idx] == "g0":
            pending = mat_prod(pending, alpha.letters[idx])
        else:
            g2 = mat_prod(pending, alpha.letters[idx])
            j = alpha.index.get(g2)
            if j is None or alpha.kind[j] == "g0":
                raise ConsistencyError("left translate left the adjacency coset")
            out.append(j)
            pending = mat_id()
    return tuple(out) + (alpha.index[pending],)


def word_for_automorphism(ctx, lab, alpha, g):
    """A word u with m(u) = g, per the path-reconstruction method: walk the
    straight segment from the base projection point to its g-image, crossing
    one inner wall at a time, then correct by a stabilizer letter."""
    g = tuple(tuple(int(x) for x in row) for row in g)
    if not ctx.is_isometry(g):
        raise MembershipError("not an isometry")
    if ctx.eta(g) not in (1, 11):
        raise MembershipError("discriminant action is not +-1")
    target = tuple(vec_mat(ctx.a32, [list(r) for r in g]))
    path_letters = _segment_path(ctx, lab, alpha, target)
    prod = mat_id()
    for idx in path_letters:
        prod = mat_prod(prod, alpha.letters[idx])
    h = mat_prod(g, mat_inv(prod))
    if h not in alpha.index or alpha.kind[alpha.index[h]] != "g0":
        raise MembershipError("isometry does not map the chamber orbit correctly")
    word = gh_normalize(alpha, (alpha.index[h],) + tuple(path_letters))
    if word_matrix(alpha, word) != g:
        raise ConsistencyError("reconstructed word has the wrong product")
    return word


def _segment_path(ctx, lab, alpha, target, max_steps=100000):
    """Letters [g_N, ..., g_1] of a chamber path from D0 to the chamber of
    `target`, by crossing the wall hit first along the segment."""
    a32 = tuple(Fraction(x) for x in ctx.a32)
    for attempt in range(8):
        start = _perturbed_start(ctx, lab, attempt)
        letters = _walk_from(ctx, lab, alpha, start, target, max_steps)
        if letters is not None:
            return letters
    raise ConsistencyError("segment walk kept hitting lower-dimensional faces")


def _perturbed_start(ctx, lab, attempt):
    if attempt == 0:
        return tuple(Fraction(x) for x in ctx.a32)
    rng = random.Random(97 + attempt)
    walls = lab.forms
    base = [Fraction(x) for x in ctx.a32]
    # a small rational interior perturbation keeps all wall margins positive
    pert = [Fraction(rng.randint(-3, 3), 1000) for _ in range(19)]
    cand = [a + b for a, b in zip(base, pert)]
    for f in walls:
        if sum(Fraction(f[i]) * cand[i] for i in range(19)) <= 0:
            return tuple(Fraction(x) for x in ctx.a32)
    return tuple(cand)


def _walk_from(ctx, lab, alpha, start, target, max_steps):
    letters = []
    g = mat_id()
    t_cur = Fraction(0)
    for _ in range(max_steps):
        gmat = [list(r) for r in g]
        ginv = mat_inv(g)
        # express current chamber's walls: preimages are the fixed wall forms;
        # segment x(t) = start + t (target - start) crosses (form)^g at
        # parameter from the preimage pairing with start^g^{-1}, target^g^{-1}
        s_pre = tuple(vec_mat(start, [list(r) for r in ginv]))
        t_pre = tuple(vec_mat(tuple(Fraction(x) for x in target),
                              [list(r) for r in ginv]))
        best = None
        for f in lab.forms:
            sv = sum(Fraction(f[i]) * s_pre[i] for i in range(19))
            tv = sum(Fraction(f[i]) * t_pre[i] for i in range(19))
            if tv >= 0:
                continue
            tc = sv / (sv - tv)
            if tc <= t_cur:
                continue
            if best is None or tc < best[0]:
                best = (tc, f, False)
            elif tc == best[0]:
                best = (best[0], best[1], True)  # tie: restart with jitter
        if best is None:
            return letters
        tc, form, tie = best
        if tie:
            return None
        wall = lab.wall_of_form[form]
        if wall.outer:
            raise MembershipError("segment crossed an outer wall")
        gprime = alpha.adj[form][0]
        letters.insert(0, alpha.index[gprime])
        g = mat_prod(gprime, g)
        t_cur = tc
    raise ConsistencyError("segment walk exceeded the step budget")
