"""Faces of the base chamber: inductive enumeration by codimension, the
chamber rings around faces, codimension-2 classification, and the orbit
graphs that decompose ADE curve configurations under the automorphism group.

A face is identified by its supporting subspace, stored as the canonical
(reduced-row-echelon) key of the span of the linear forms vanishing on it.
All inequality tests run against the fixed list of the 80 wall forms; the
relative-interior LP results are cached by subspace key, so each geometric
question is answered exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import CapExceededError, ConsistencyError, DomainError
from .enumeration import short_vectors
from .linalg import (
    in_rowspace,
    in_span,
    inverse,
    mat_mul,
    nullspace_from_rref,
    rank,
    reduce_mod_rref,
    rref,
    saturate,
    subspace_key,
    transpose,
    vec_mat,
)
from .simplex import margin_and_witness


@dataclass
class Face:
    """A face of the base chamber, given by its supporting-subspace data."""

    codim: int
    normal_forms: tuple       # independent forms spanning the annihilator
    key: tuple                # canonical subspace key
    witness: tuple | None = None
    orbit: int | None = None


@dataclass
class FaceLevel:
    codim: int
    keys: set
    orbits: list              # list of sets of keys
    reps: dict                # orbit index -> Face
    orbit_of: dict            # key -> orbit index


def type_label(component_names):
    """Canonical ADE type label like '2A1+A2' from component names."""
    from collections import Counter

    c = Counter(component_names)
    parts = []
    for name in sorted(c, key=lambda s: (s[0], int(s[1:]))):
        k = c[name]
        parts.append(f"{k}{name}" if k > 1 else name)
    return "+".join(parts)


def milnor_number(tau):
    total = 0
    for term in tau.split("+"):
        i = 0
        while term[i].isdigit():
            i += 1
        mult = int(term[:i]) if i else 1
        total += mult * int(term[i + 1:])
    return total


class FaceLab:
    """Face enumeration and classification over a completed scan."""

    def __init__(self, ctx, scan, cap=3, orbit_numbers=None):
        self.ctx = ctx
        self.scan = scan
        self.cap = cap
        self.d0 = scan.chamber
        self.forms = [w.form for w in self.d0.walls]
        self.wall_of_form = {w.form: w for w in self.d0.walls}
        self.g0 = [tuple(tuple(int(x) for x in row) for row in g) for g in scan.aut_d0]
        self._g0_formact = [self._form_action(g) for g in self.g0]
        self._good_cache = {}
        self._ineq_cache = {}
        self._ring_cache = {}
        self._dring_cache = {}
        self._curves_cache = {}
        self._levels = {}
        self._gw = self._adjacency_table()
        # orbit_numbers: scan orbit position -> published orbit number (1..10)
        self.orbit_numbers = orbit_numbers or {
            i: i + 1 for i in range(len(scan.wall_orbits))}
        self.wall_orbit_index = {}
        for i, rec in enumerate(scan.wall_orbits):
            for w in rec.members:
                self.wall_orbit_index[w.form] = i

    # -- group action on forms -------------------------------------------

    def _form_action(self, g):
        """Matrix m with: wall form row f of v maps to f . m for v -> v . g."""
        gi = inverse([list(r) for r in g])
        git = transpose(gi)
        return [[int(x) for x in row] for row in git]

    def _act_form(self, f, m):
        return tuple(vec_mat(f, m))

    def act_key(self, key, idx):
        m = self._g0_formact[idx]
        rows = [self._act_form(f, m) for f in key]
        return subspace_key(rows)

    # -- adjacency isometries for all 80 walls ----------------------------

    def _adjacency_table(self):
        ctx = self.ctx
        table = {}
        for rec in self.scan.wall_orbits:
            rep = rec.rep
            for member in rec.members:
                if rec.inner:
                    h = self._stabilizer_transporter(rep, member)
                    table[member.form] = tuple(
                        tuple(int(x) for x in row)
                        for row in mat_mul([list(r) for r in rec.generator],
                                           [list(r) for r in h]))
                else:
                    den = 1
                    from math import gcd as _gcd
                    for x in member.vector:
                        den = den * Fraction(x).denominator // _gcd(
                            den, Fraction(x).denominator)
                    r = tuple(int(x * den) for x in member.vector)
                    table[member.form] = ctx.reflection(r)
        return table

    def _stabilizer_transporter(self, rep, member):
        """h in Aut(X, D0) with rep^h = member (as walls)."""
        for idx, g in enumerate(self.g0):
            img = vec_mat(rep.vector, [list(r) for r in g])
            if self.ctx.dual_form(img) == member.form:
                return g
        raise ConsistencyError("walls not in one stabilizer orbit")

    def adjacency_isometry(self, form):
        return self._gw[form]

    # -- relative-interior tests -------------------------------------------

    def good_subspace(self, eq_forms):
        """Does the span of eq_forms support a face of D0 of matching codim?

        Returns (bool, witness, key); cached by the subspace key.
        """
        rows, pivots = rref(eq_forms)
        key = tuple(rows)
        hit = self._good_cache.get(key)
        if hit is not None:
            return hit[0], hit[1], key
        rest = [f for f in self.forms if not in_rowspace(f, rows, pivots)]
        ns = nullspace_from_rref(rows, pivots, 19)
        t, wit = margin_and_witness(rest, rows, self.ctx.a32_form, nullspace=ns)
        good = t is not None and t > 0
        self._good_cache[key] = (good, wit if good else None)
        return good, self._good_cache[key][1], key

    def face_ineqs(self, face):
        """The nonredundant inequality list of a face: the wall forms whose
        restriction supports a wall of the face (one per hyperplane)."""
        if face.key in self._ineq_cache:
            return self._ineq_cache[face.key]
        rows, pivots = rref(face.normal_forms)
        out = []
        seen_keys = set()
        for f in self.forms:
            if in_rowspace(f, rows, pivots):
                continue
            good, _, key = self.good_subspace(list(face.normal_forms) + [f])
            if good and key not in seen_keys:
                seen_keys.add(key)
                out.append(f)
        self._ineq_cache[face.key] = tuple(out)
        return self._ineq_cache[face.key]

    def subdivide_face(self, face):
        """Faces of codimension codim+1 contained in the given face."""
        subs = []
        seen = set()
        for f in self.face_ineqs(face):
            good, wit, key = self.good_subspace(list(face.normal_forms) + [f])
            if not good:
                raise ConsistencyError("inequality list lost a wall")
            if key in seen:
                continue
            seen.add(key)
            nf = _independent_rows(list(face.normal_forms) + [f])
            subs.append(Face(codim=face.codim + 1, normal_forms=nf, key=key,
                             witness=wit))
        return subs

    # -- levels -------------------------------------------------------------

    def faces_of_codim(self, mu):
        """Global face list at codimension mu with the stabilizer orbits."""
        if mu < 1:
            raise DomainError("codimension must be >= 1")
        if mu > self.cap:
            raise CapExceededError(
                f"codimension {mu} above the configured cap {self.cap}")
        if mu in self._levels:
            return self._levels[mu]
        if mu == 1:
            faces = [Face(codim=1, normal_forms=(w.form,),
                          key=subspace_key([w.form]), witness=w.witness)
                     for w in self.d0.walls]
            level = self._close_level(1, faces)
        else:
            prev = self.faces_of_codim(mu - 1)
            found = {}
            for rep in prev.reps.values():
                for sub in self.subdivide_face(rep):
                    if sub.key not in found:
                        found[sub.key] = sub
            level = self._close_level(mu, list(found.values()))
        self._levels[mu] = level
        return level

    def _close_level(self, mu, discovered):
        keys = set()
        orbits = []
        reps = {}
        orbit_of = {}
        by_key = {f.key: f for f in discovered}
        for f in sorted(by_key.values(), key=lambda x: x.key):
            if f.key in keys:
                continue
            orbit = set()
            stack = [f.key]
            while stack:
                k = stack.pop()
                if k in orbit:
                    continue
                orbit.add(k)
                for idx in range(len(self.g0)):
                    k2 = self.act_key(k, idx)
                    if k2 not in orbit:
                        stack.append(k2)
            oid = len(orbits)
            orbits.append(orbit)
            f.orbit = oid
            reps[oid] = f
            for k in orbit:
                keys.add(k)
                orbit_of[k] = oid
        return FaceLevel(codim=mu, keys=keys, orbits=orbits, reps=reps,
                         orbit_of=orbit_of)

    # -- curves through a face ---------------------------------------------

    def curves_through_face(self, face):
        """C(f): rational-curve classes whose hyperplane contains the face."""
        if face.key in self._curves_cache:
            return self._curves_cache[face.key]
        ctx = self.ctx
        vecs = [ctx.vector_of_form(f) for f in face.normal_forms]
        ints = []
        den = 1
        from math import gcd as _gcd
        for v in vecs:
            for x in v:
                den = den * Fraction(x).denominator // _gcd(den, Fraction(x).denominator)
        for v in vecs:
            ints.append([int(Fraction(x) * den) for x in v])
        basis = saturate(ints, 19)
        gram_sub = mat_mul(mat_mul(basis, ctx.gram), transpose(basis))
        gram_sub = [[int(x) for x in row] for row in gram_sub]
        out = []
        for z in short_vectors(gram_sub, -2):
            r = tuple(sum(z[i] * basis[i][j] for i in range(len(basis)))
                      for j in range(19))
            if ctx.pair_s(r, ctx.a32) < 0:
                r = tuple(-x for x in r)
            if r in out:
                continue
            if ctx.rational_curve_test(r):
                out.append(r)
        out = sorted(set(out))
        self._curves_cache[face.key] = out
        return out

    def face_type(self, face):
        """ADE type label of C(f), or None when C(f) is empty."""
        curves = self.curves_through_face(face)
        if not curves:
            return None
        from .fibrations import _components, _finite_name

        n = len(curves)
        gram = [[self.ctx.pair_s(a, b) for b in curves] for a in curves]
        adj = [[1 if i != j and gram[i][j] != 0 else 0 for j in range(n)]
               for i in range(n)]
        names = []
        for comp in _components(adj, n):
            sub = [[gram[i][j] for j in comp] for i in comp]
            names.append(_finite_name(sub))
        return type_label(names)

    # -- chamber sets -------------------------------------------------------

    def chambers_containing_face(self, face):
        """D(f) by the breadth-first walk over adjacency isometries.

        Returns a list of (g, a_image) pairs, deduplicated by a-image; the
        first entry is the identity (D0 itself).
        """
        if face.key in self._dring_cache:
            return self._dring_cache[face.key]
        ident = tuple(tuple(1 if i == j else 0 for j in range(19)) for i in range(19))
        chambers = [(ident, tuple(self.ctx.a32))]
        images = {tuple(self.ctx.a32)}
        i = 0
        while i < len(chambers):
            g, _ = chambers[i]
            gmat = [list(r) for r in g]
            gt = transpose(gmat)
            pre = [self._act_form(f, gt) for f in face.normal_forms]
            prows, ppiv = rref(pre)
            for fw in self.forms:
                if not in_rowspace(fw, prows, ppiv):
                    continue
                gnew = mat_mul([list(r) for r in self._gw[fw]], gmat)
                a_new = tuple(vec_mat(self.ctx.a32, gnew))
                if a_new not in images:
                    images.add(a_new)
                    chambers.append(
                        (tuple(tuple(int(x) for x in row) for row in gnew), a_new))
            i += 1
        self._dring_cache[face.key] = chambers
        return chambers

    def in_nef_locally(self, a_image, curves):
        """Whether the chamber with the given projection point lies in the
        nef-and-big cone, tested against the curves through the face."""
        return all(self.ctx.pair_s(a_image, c) > 0 for c in curves)

    # -- codimension 2 ------------------------------------------------------

    def ring_around(self, face):
        """The ordered chamber ring around a codimension-2 face.

        Returns a list of (g, entering_form, exiting_form) triples in cyclic
        order starting and ending at D0 (closure asserted), where the forms
        are the two D0-wall forms containing the face preimage.
        """
        if face.codim != 2:
            raise DomainError("chamber rings are defined for codimension 2")
        if face.key in self._ring_cache:
            return self._ring_cache[face.key]
        ident = tuple(tuple(1 if i == j else 0 for j in range(19)) for i in range(19))
        nrows, npiv = rref(face.normal_forms)
        walls0 = [f for f in self.forms if in_rowspace(f, nrows, npiv)]
        if len(walls0) != 2:
            raise ConsistencyError(
                f"codim-2 face lies on {len(walls0)} wall hyperplanes")
        ring = []
        g = ident
        prev_a = None
        exit_form = walls0[0]
        start_a = tuple(self.ctx.a32)
        while True:
            gmat = [list(r) for r in g]
            a_cur = tuple(vec_mat(self.ctx.a32, gmat))
            gnew = mat_mul([list(r) for r in self._gw[exit_form]], gmat)
            a_new = tuple(vec_mat(self.ctx.a32, gnew))
            ring.append((g, exit_form))
            gt = transpose(gnew)
            pre = [self._act_form(f, gt) for f in face.normal_forms]
            prows, ppiv = rref(pre)
            nxt_walls = [f for f in self.forms if in_rowspace(f, prows, ppiv)]
            if len(nxt_walls) != 2:
                raise ConsistencyError("ring step left the codim-2 locus")
            # choose the exit that does not lead straight back
            chosen = None
            for cand in nxt_walls:
                gback = mat_mul([list(r) for r in self._gw[cand]],
                                [list(r) for r in gnew])
                a_back = tuple(vec_mat(self.ctx.a32, gback))
                if a_back != a_cur:
                    chosen = cand
            if chosen is None:
                raise ConsistencyError("ring step has no forward exit")
            g = tuple(tuple(int(x) for x in row) for row in gnew)
            exit_form = chosen
            if a_new == start_a:
                break
            if len(ring) > 64:
                raise ConsistencyError("chamber ring failed to close")
        self._ring_cache[face.key] = ring
        return ring

    def classify_codim2(self, face):
        """Type n_lr, exact dihedral-angle data and the wall-orbit pair."""
        if face.codim != 2:
            raise DomainError("classification applies to codimension-2 faces")
        ring = self.ring_around(face)
        n = len(ring)
        curves = self.curves_through_face(face)
        in_nef = []
        angles = []
        for g, _ in ring:
            gmat = [list(r) for r in g]
            a_img = tuple(vec_mat(self.ctx.a32, gmat))
            in_nef.append(self.in_nef_locally(a_img, curves))
            gt = transpose(gmat)
            pre = [self._act_form(f, gt) for f in face.normal_forms]
            prows, ppiv = rref(pre)
            v1, v2 = [self.ctx.vector_of_form(f) for f in self.forms
                      if in_rowspace(f, prows, ppiv)]
            c2 = Fraction(self.ctx.pair_s(v1, v2)) ** 2 / (
                self.ctx.pair_s(v1, v1) * self.ctx.pair_s(v2, v2))
            angles.append(c2)
        l = sum(1 for x in in_nef if x)
        nrows, npiv = rref(face.normal_forms)
        walls0 = [f for f in self.forms if in_rowspace(f, nrows, npiv)]
        r = 0
        for c in curves:
            cf = self.ctx.dual_form(c)
            if cf in walls0 or tuple(-x for x in cf) in walls0:
                r += 1
        pair_label = "".join(sorted(
            _orbit_char(self.orbit_numbers[self.wall_orbit_index[f]])
            for f in walls0))
        return {
            "n": n,
            "l": l,
            "r": r,
            "type": f"{n}_{l}{r}",
            "angles": angles,
            "wall_pair": pair_label,
            "curve_count": len(curves),
        }

    # -- the ADE orbit graph --------------------------------------------------

    def ade_orbit_count(self, tau, progress=None):
        """Number of automorphism-group orbits of tau-configurations, via the
        connected components of the orbit graph on tau-faces."""
        mu = milnor_number(tau)
        if mu + 1 > self.cap:
            raise CapExceededError(
                f"tau = {tau} needs faces of codim {mu + 1} > cap {self.cap}")
        level = self.faces_of_codim(mu)
        nodes = [oid for oid, rep in level.reps.items()
                 if self.face_type(rep) == tau]
        node_set = set(nodes)
        edges = set()
        for oid in nodes:
            rep = level.reps[oid]
            curves_f = self.curves_through_face(rep)
            if len(curves_f) != mu:
                raise ConsistencyError("tau-face with wrong curve count")
            for phi in self.subdivide_face(rep):
                curves_phi = self.curves_through_face(phi)
                for g, a_img in self.chambers_containing_face(phi):
                    if not self.in_nef_locally(a_img, curves_phi):
                        continue
                    gmat = [list(r) for r in g]
                    gt = transpose(gmat)
                    image_forms = [self._act_form(self.ctx.dual_form(c), gt)
                                   for c in curves_f]
                    good, _, key = self.good_subspace(image_forms)
                    if not good:
                        continue
                    oid2 = level.orbit_of.get(key)
                    if oid2 is None:
                        raise ConsistencyError("mapped face missing from level")
                    if oid2 != oid:
                        edges.add((min(oid, oid2), max(oid, oid2)))
            if progress:
                progress(oid)
        return _component_count(nodes, edges), sorted(node_set), sorted(edges)


def _component_count(nodes, edges):
    parent = {n: n for n in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    return len({find(n) for n in nodes})


def _orbit_char(number):
    # orbit numbers run 1..10, with 10 shortened to t in pair labels
    return "t" if number == 10 else str(number)


def _independent_rows(rows):
    out = []
    for r in rows:
        if rank(out + [list(r)]) > len(out):
            out.append(list(r))
    return tuple(tuple(x for x in r) for r in out)
