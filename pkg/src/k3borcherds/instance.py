"""The bundled Apery-Fermi K3 instance.

Loads the instance file (Neron-Severi basis, the 32 curve classes, the
distinguished vectors, gluing data, and the expected-values pack), verifies
the combinatorial intersection rules before anything else may run, and
provides the instance-level operations: base-data verification, the
configuration automorphism groups, and the rational-curve census.

Curve labels: ``L`` curves carry a sign word over {+,-,0} of length 3 with
at most one 0; ``M`` curves carry an index 1..3 and two signs.  Vectors are
rows in the fixed basis (u1, u2, e1..e8 twice, v12).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .errors import AmplenessError, ConsistencyError, DataCorruptionError
from .lattice import Lattice, discriminant_form, glue_overlattice
from .linalg import det_bareiss, mat_mul, pair, rank, transpose, vec_mat

SIGNS = {"+": 1, "-": -1, "0": 0}
SIGN_CHARS = {1: "+", -1: "-", 0: "0"}


def e8_gram():
    """E8(-1) in the basis e1..e8: e1 hangs off e4, e2-e3-...-e8 is the chain."""
    g = [[0] * 8 for _ in range(8)]
    for i in range(8):
        g[i][i] = -2
    for a, b in [(0, 3), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)]:
        g[a][b] = g[b][a] = 1
    return g


def d5a2_gram():
    """Negative definite root lattice of type D5+A2 in the basis f1..f7."""
    g = [[0] * 7 for _ in range(7)]
    for i in range(7):
        g[i][i] = -2
    for a, b in [(0, 2), (1, 2), (2, 3), (3, 4), (5, 6)]:
        g[a][b] = g[b][a] = 1
    return g


def ns_gram():
    """U + E8(-1) + E8(-1) + <-12> in the basis (u1, u2, e^(1), e^(2), v12)."""
    g = [[0] * 19 for _ in range(19)]
    g[0][1] = g[1][0] = 1
    e8 = e8_gram()
    for i in range(8):
        for j in range(8):
            g[2 + i][2 + j] = e8[i][j]
            g[10 + i][10 + j] = e8[i][j]
    g[18][18] = -12
    return g


def u_gram():
    return [[0, 1], [1, 0]]


def curve_labels():
    """The 32 labels: 20 L curves, then 12 M curves, in a fixed order."""
    labels = []
    for g1 in "-0+":
        for g2 in "-0+":
            for g3 in "-0+":
                word = g1 + g2 + g3
                if word.count("0") <= 1:
                    labels.append("L" + word)
    for k in "123":
        for a in "-+":
            for b in "-+":
                labels.append("M" + k + a + b)
    return labels


def expected_pairing(n1: str, n2: str) -> int:
    """Intersection number of two labelled curves from the combinatorial rules."""
    if n1 == n2:
        return -2
    f1, f2 = n1[0], n2[0]
    if f1 == "L" and f2 == "L":
        g1 = [SIGNS[c] for c in n1[1:]]
        g2 = [SIGNS[c] for c in n2[1:]]
        diff = [i for i in range(3) if g1[i] != g2[i]]
        if len(diff) == 1 and (g1[diff[0]] == 0 or g2[diff[0]] == 0):
            return 1
        return 0
    if f1 == "M" and f2 == "M":
        k1, a1, b1 = n1[1], n1[2], n1[3]
        k2, a2, b2 = n2[1], n2[2], n2[3]
        if k1 == k2:
            return 2 if (a1 == a2 and b1 != b2) else 0
        if a1 == a2 and b1 == b2:
            return 1
        if a1 != a2 and b1 != b2:
            return 1
        return 0
    if f1 == "M":
        n1, n2 = n2, n1
    g = [SIGNS[c] for c in n1[1:]]
    k = int(n2[1])
    b = SIGNS[n2[3]]
    i, j = [x for x in range(3) if x != k - 1]
    return 1 if (g[k - 1] == 0 and b == g[i] * g[j]) else 0


# --- Mukai-Ohashi side -----------------------------------------------------
#
# Cube matching: position of L_{g1 g2 g3} in the first cube carries the node
# of the second cube listed here.  M curves match conics C_{mn,rho} with
# rho in {t, T} (the two roots, t <-> 1/t).

MO_CUBE = {
    "---": "P3", "--0": "Q34", "--+": "T4",
    "-0-": "Q31", "-0+": "Q24",
    "-+-": "T1", "-+0": "Q21", "-++": "P2",
    "0--": "Q32", "0-+": "Q14", "0+-": "Q41", "0++": "Q23",
    "+--": "T2", "+-0": "Q12", "+-+": "P1",
    "+0-": "Q42", "+0+": "Q13",
    "++-": "P4", "++0": "Q43", "+++": "T3",
}

MO_CONICS = {
    "M1--": ("23", "t"), "M1-+": ("14", "T"), "M1+-": ("23", "T"), "M1++": ("14", "t"),
    "M2--": ("13", "t"), "M2-+": ("24", "T"), "M2+-": ("13", "T"), "M2++": ("24", "t"),
    "M3--": ("34", "t"), "M3-+": ("12", "T"), "M3+-": ("34", "T"), "M3++": ("12", "t"),
}


def mo_expected_pairing(n1: str, n2: str) -> int:
    """Intersection rules on the quartic-surface side."""
    if n1 == n2:
        return -2
    k1, k2 = n1[0], n2[0]
    if k1 != "C" and k2 != "C":
        # P/Q/T cube: same incidence graph as the L cube, via the matching
        inv = {v: k for k, v in MO_CUBE.items()}
        return expected_pairing("L" + inv[n1], "L" + inv[n2])
    if k1 == "C" and k2 == "C":
        s1, r1 = set(n1[1:3]), n1[3]
        s2, r2 = set(n2[1:3]), n2[3]
        if s1 == s2:
            return -2 if r1 == r2 else 0
        if len(s1 & s2) == 1:
            return 1 if r1 == r2 else 0
        return 0 if r1 == r2 else 2
    if k1 != "C":
        n1, n2 = n2, n1
    # C vs P/Q/T
    if n2[0] in ("P", "T"):
        return 0
    pair_c = set(n1[1:3])
    pair_q = set(n2[1:3])
    return 1 if (pair_c | pair_q == {"1", "2", "3", "4"} and pair_c & pair_q == set()) else 0


def mo_label(fermi_label: str) -> str:
    if fermi_label[0] == "L":
        return MO_CUBE[fermi_label[1:]]
    mn, rho = MO_CONICS[fermi_label]
    return "C" + mn + rho


# --- instance container -----------------------------------------------------


@dataclass
class InstanceData:
    ns: Lattice
    root_r: Lattice
    curves: dict            # label -> integer row (tuple)
    h8: tuple
    a32: tuple
    a_r: tuple               # in the R basis
    glue_r: tuple            # gamma_R lift in the R basis (Fractions)
    goldens: dict

    @property
    def labels(self):
        return list(self.curves)

    def curve_matrix(self):
        return [list(self.curves[n]) for n in self.labels]


def _parse_int(s):
    return int(s)


def _parse_vec(obj):
    scale = obj.get("scale", 1)
    return tuple(Fraction(int(c), scale) for c in obj["coords"])


def load_instance(path=None) -> InstanceData:
    """Load and fully verify the bundled instance file (all-or-nothing)."""
    if path is None:
        src = resources.files("k3borcherds.data").joinpath("apery_fermi.json")
        raw = json.loads(src.read_text())
    else:
        with open(path) as fh:
            raw = json.load(fh)
    ns = Lattice([[_parse_int(x) for x in row] for row in raw["lattices"]["NS"]["gram"]],
                 label="NS")
    root_r = Lattice([[_parse_int(x) for x in row] for row in raw["lattices"]["R"]["gram"]],
                     label="D5+A2")
    curves = {name: tuple(int(c) for c in obj["coords"])
              for name, obj in raw["curves"].items()}
    inst = InstanceData(
        ns=ns,
        root_r=root_r,
        curves=curves,
        h8=_parse_vec(raw["vectors"]["h8"]),
        a32=_parse_vec(raw["vectors"]["a32"]),
        a_r=_parse_vec(raw["vectors"]["a_R"]),
        glue_r=_parse_vec(raw["vectors"]["glue_R"]),
        goldens=raw["goldens"],
    )
    verify_base_data(inst)
    return inst


def verify_base_data(inst: InstanceData) -> dict:
    """Check the instance data against the combinatorial intersection rules.

    Returns a small report; raises DataCorruptionError naming the offending
    pair on any mismatch.  Nothing else in the package should run off a
    corrupt instance, so load_instance calls this unconditionally.
    """
    labels = inst.labels
    if sorted(labels) != sorted(curve_labels()):
        raise DataCorruptionError("curve label set is wrong")
    gram = inst.ns.gram
    for n1 in labels:
        for n2 in labels:
            got = pair(inst.curves[n1], gram, inst.curves[n2])
            want = expected_pairing(n1, n2)
            if got != want:
                raise DataCorruptionError(
                    f"<{n1},{n2}> = {got}, rules demand {want}")
    mat = inst.curve_matrix()
    if rank(mat) != 19:
        raise DataCorruptionError("curve classes do not span a rank-19 lattice")
    # discriminant of the span: pick 19 independent rows, det of their Gram
    basis = []
    for row in mat:
        if rank(basis + [row]) > rank(basis):
            basis.append(row)
        if len(basis) == 19:
            break
    det = det_bareiss(mat_mul(mat_mul(basis, [list(r) for r in gram]), transpose(basis)))
    if det != 12:
        raise DataCorruptionError(f"span of curves has Gram determinant {det}, not 12")
    # (-1)^(n(n-1)/2) det = classical discriminant convention of the source tables
    if (-1) ** (19 * 18 // 2) * det != -12:
        raise DataCorruptionError("discriminant sign convention check failed")
    # quartic-model side: the bijection must transport all intersection numbers
    for n1 in labels:
        for n2 in labels:
            want = mo_expected_pairing(mo_label(n1), mo_label(n2))
            got = pair(inst.curves[n1], gram, inst.curves[n2])
            if got != want:
                raise DataCorruptionError(
                    f"quartic-side mismatch at {n1}~{mo_label(n1)}, {n2}~{mo_label(n2)}: "
                    f"{got} vs {want}")
    # distinguished vectors
    checks = {
        "h8 norm": (pair(inst.h8, gram, inst.h8), 8),
        "a32 norm": (pair(inst.a32, gram, inst.a32), 32),
        "a_R norm": (pair(inst.a_r, inst.root_r.gram, inst.a_r), -32),
    }
    for name, (got, want) in checks.items():
        if got != want:
            raise DataCorruptionError(f"{name}: {got} != {want}")
    for j in range(7):
        fj = [1 if i == j else 0 for i in range(7)]
        if pair(inst.a_r, inst.root_r.gram, fj) != 1:
            raise DataCorruptionError("a_R does not pair to 1 with every simple root")
    for name, v in inst.curves.items():
        d = pair(inst.a32, gram, v)
        if name[0] == "L" or name in ("M2-+", "M2+-", "M3--", "M3++"):
            want = 1
        elif name[1] == "1":
            want = 4
        else:
            want = 7
        if d != want:
            raise DataCorruptionError(f"<a32,{name}> = {d}, expected {want}")
        dh = pair(inst.h8, gram, v)
        if (dh == 0) != (name[0] == "L" and name.count("0") == 1):
            raise DataCorruptionError(f"<h8,{name}> = {dh} breaks the nodal-curve rule")
    return {"curves": len(labels), "rank": 19, "gram_det": det}


def build_glue(inst: InstanceData):
    """Glue NS and R into the even unimodular rank-26 overlattice."""
    gamma_s = tuple(Fraction(1, 12) if i == 18 else Fraction(0) for i in range(19))
    return glue_overlattice(inst.ns, inst.root_r, [(gamma_s, inst.glue_r)])


def ns_discriminant(inst: InstanceData):
    return discriminant_form(inst.ns)


# --- configuration automorphisms (the finite groups of the curve system) ----


def label_action_mu(name):
    """L fixed; M_{k,a,b} -> M_{k,-a,b}."""
    if name[0] == "L":
        return name
    flip = {"+": "-", "-": "+"}
    return "M" + name[1] + flip[name[2]] + name[3]


def label_action_epsilon(name):
    """L_{g} -> L_{-g}; M_{k,a,b} -> M_{k,-a,b}."""
    flip = {"+": "-", "-": "+", "0": "0"}
    if name[0] == "L":
        return "L" + "".join(flip[c] for c in name[1:])
    return "M" + name[1] + flip[name[2]] + name[3]


def label_action_swap12(name):
    """The involution exchanging the first two Fermi coordinates and
    inverting both: (g1,g2,g3) -> (-g2,-g1,g3) on the cube."""
    flip = {"+": "-", "-": "+", "0": "0"}
    if name[0] == "L":
        g1, g2, g3 = name[1], name[2], name[3]
        return "L" + flip[g2] + flip[g1] + g3
    k, a, b = name[1], name[2], name[3]
    if k == "3":
        return name
    k2 = "2" if k == "1" else "1"
    return "M" + k2 + flip[a] + flip[b]


def permutation_matrix(inst, perm):
    """Lift a label permutation to an isometry matrix of the NS lattice."""
    from .linalg import inverse, mat_mul, rank

    labels = inst.labels
    rows = []
    imgs = []
    for name in labels:
        if rank(rows + [list(inst.curves[name])]) > len(rows):
            rows.append(list(inst.curves[name]))
            imgs.append(list(inst.curves[perm[name]]))
        if len(rows) == 19:
            break
    g = mat_mul(inverse(rows), imgs)
    mat = tuple(tuple(int(x) for x in row) for row in g)
    for name in labels:
        got = tuple(vec_mat(inst.curves[name], [list(r) for r in mat]))
        if got != tuple(inst.curves[perm[name]]):
            raise ConsistencyError(f"permutation does not lift at {name}")
    return mat


def configuration_automorphisms(inst):
    """The groups of the 32-curve configuration: intersection-preserving
    permutations, their isometry lifts, and the eta-filtered subgroup.

    Returns a report dict; raises on any mismatch with the structure facts
    (sizes 96/48, the mu/epsilon decompositions, the tetrahedron S4).
    """
    labels = inst.labels
    n = len(labels)
    gram = inst.ns.gram
    pairm = [[pair(inst.curves[a], gram, inst.curves[b]) for b in labels] for a in labels]
    row_profile = [tuple(sorted(row)) for row in pairm]
    order = _automorphism_order(pairm)
    perms = []
    assign = {}
    used = set()

    def backtrack(pos):
        if pos == n:
            perms.append(dict(assign))
            return
        i = order[pos]
        for j in range(n):
            if j in used or row_profile[i] != row_profile[j]:
                continue
            ok = True
            for i2, j2 in assign.items():
                if pairm[i][i2] != pairm[j][j2]:
                    ok = False
                    break
            if ok:
                assign[i] = j
                used.add(j)
                backtrack(pos + 1)
                del assign[i]
                used.discard(j)

    backtrack(0)
    label_perms = [{labels[i]: labels[p[i]] for i in p} for p in perms]
    lifts = []
    for p in label_perms:
        lifts.append(permutation_matrix(inst, p))
    disc = discriminant_form(inst.ns)
    from .lattice import eta_image
    etas = [eta_image(inst.ns, m, disc) for m in lifts]
    full = list(zip(label_perms, lifts, etas))
    aut = [(p, m, e) for (p, m, e) in full if e in (1, 11)]
    report = {
        "o_l32": len(full),
        "aut_l32": len(aut),
        "orbit_sizes": _orbit_sizes(labels, [p for p, _, _ in full if True]),
        "full": full,
        "aut": aut,
    }
    return report


def _automorphism_order(pairm):
    n = len(pairm)
    chosen = []
    remaining = set(range(n))
    while remaining:
        if not chosen:
            i = min(remaining)
        else:
            i = max(remaining,
                    key=lambda x: sum(1 for c in chosen if pairm[x][c] != 0))
        chosen.append(i)
        remaining.discard(i)
    return chosen


def _orbit_sizes(labels, perms):
    idx = {name: i for i, name in enumerate(labels)}
    parent = list(range(len(labels)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in perms:
        for a, b in p.items():
            ra, rb = find(idx[a]), find(idx[b])
            if ra != rb:
                parent[ra] = rb
    from collections import Counter
    return sorted(Counter(find(i) for i in range(len(labels))).values())


def rho_l_matrix(perm):
    """The O(3) matrix of the action on the cube of corner L-curves."""
    from fractions import Fraction as F

    corners = [(a, b, c) for a in (1, -1) for b in (1, -1) for c in (1, -1)]

    def to_label(v):
        return "L" + "".join(SIGN_CHARS[x] for x in v)

    def to_vec(name):
        return tuple(SIGNS[c] for c in name[1:])

    images = {v: to_vec(perm[to_label(v)]) for v in corners}
    basis = [(1, 1, 1), (1, -1, 1), (1, 1, -1)]
    a = [list(b) for b in basis]
    bimg = [list(images[b]) for b in basis]
    from .linalg import inverse, mat_mul
    m = mat_mul(inverse(a), bimg)
    for v in corners:
        got = tuple(sum(F(v[i]) * m[i][j] for i in range(3)) for j in range(3))
        if got != tuple(F(x) for x in images[v]):
            raise ConsistencyError("cube action is not linear")
    return [[int(x) for x in row] for row in m]


def det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


# --- the rational-curve census ----------------------------------------------


def verify_ampleness(ctx):
    """The ampleness pack for a32: no orthogonal roots, Sep(h8, a32) empty."""
    from .enumeration import orthogonal_roots, separating_roots

    orth = orthogonal_roots(ctx.gram, ctx.a32)
    if orth:
        raise AmplenessError("a32 is orthogonal to a (-2)-vector")
    sep = separating_roots(ctx.gram, ctx.h8, ctx.a32)
    if sep:
        raise AmplenessError("Sep(h8, a32) is nonempty")
    return True


def rats_census(ctx, max_degree=17, check_ample=True, threads=1):
    """Numbers of smooth rational curves of degree <= max_degree under a32."""
    if check_ample:
        verify_ampleness(ctx)
    hist = {}
    for d in range(1, max_degree + 1):
        roots = ctx.roots_of_degree(d)
        if threads > 1:
            hist[d] = _census_parallel(ctx, roots, threads)
        else:
            hist[d] = sum(1 for r in roots if ctx.rational_curve_test(r))
    return hist


def _census_parallel(ctx, roots, threads):
    # the curve test caches degree lists on the context; pre-warm them, then
    # fan the independent tests out
    import multiprocessing.dummy as mp

    with mp.Pool(threads) as pool:
        flags = pool.map(ctx.rational_curve_test, roots)
    return sum(1 for f in flags if f)


def low_h8_curves(ctx):
    """{r in Rats(X) : <r, h8> <= 2} as a sorted list of vectors."""
    from .enumeration import PairingSlice

    sl = PairingSlice(ctx.gram, [ctx.h8])
    out = set()
    for k in (0, 1, 2):
        for r in sl.solve([k], -2):
            r = tuple(int(x) for x in r)
            for cand in (r, tuple(-x for x in r)):
                if ctx.pair_s(cand, ctx.h8) <= 2 and ctx.pair_s(cand, ctx.a32) > 0 \
                        and ctx.rational_curve_test(cand):
                    out.add(cand)
    return sorted(out)
