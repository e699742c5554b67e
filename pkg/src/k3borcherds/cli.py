"""Command-line pipeline: walls, aut, faces, ade, relations, fibration,
census, verify.

Every subcommand writes machine-readable JSON (integers as decimal strings)
under --out, and with --check compares the computed values against the
expected-values pack bundled with the instance, exiting nonzero on any
mismatch.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction


def _s(x):
    """Decimal string for an integer or exact rational."""
    f = Fraction(x)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _vec(v, scale=None):
    if scale is None:
        scale = 1
        for x in v:
            d = Fraction(x).denominator
            scale = scale * d // _gcd(scale, d)
    return {"scale": scale, "coords": [_s(Fraction(x) * scale) for x in v]}


def _gcd(a, b):
    from math import gcd
    return gcd(a, b)


def _matrix(m):
    return [[_s(x) for x in row] for row in m]


class Pipeline:
    """Lazily built shared state for the subcommands."""

    def __init__(self, out_dir, threads=1, long_tier=False, instance_path=None):
        self.out_dir = out_dir
        self.threads = threads
        self.long_tier = long_tier
        self.instance_path = instance_path
        self._inst = None
        self._ctx = None
        self._scan = None
        self._lab = None
        self._names = None
        self._alpha = None

    @property
    def inst(self):
        if self._inst is None:
            from .instance import load_instance
            self._inst = load_instance(self.instance_path)
        return self._inst

    @property
    def ctx(self):
        if self._ctx is None:
            from .chambers import ChamberContext
            self._ctx = ChamberContext(self.inst)
        return self._ctx

    @property
    def scan(self):
        if self._scan is None:
            from .chambers import borcherds_scan
            self._scan = borcherds_scan(self.ctx)
        return self._scan

    @property
    def orbit_names(self):
        if self._names is None:
            from .chambers import name_wall_orbits
            self._names = name_wall_orbits(self.ctx, self.scan, self.inst.goldens)
        return self._names

    @property
    def lab(self):
        if self._lab is None:
            from .faces import FaceLab
            cap = 5 if self.long_tier else 3
            self._lab = FaceLab(self.ctx, self.scan, cap=cap,
                                orbit_numbers=self.orbit_names)
        return self._lab

    @property
    def alphabet(self):
        if self._alpha is None:
            from .relations import build_alphabet
            self._alpha = build_alphabet(self.ctx, self.scan, self.lab)
        return self._alpha

    def write(self, name, payload):
        os.makedirs(self.out_dir, exist_ok=True)
        path = os.path.join(self.out_dir, name)
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
        return path


def cmd_verify(pipe, args):
    from .instance import verify_base_data, build_glue
    from .lattice import discriminant_form

    report = verify_base_data(pipe.inst)
    over, basis, _, _ = build_glue(pipe.inst)
    ds = discriminant_form(pipe.inst.ns)
    dr = discriminant_form(pipe.inst.root_r)
    payload = {
        "base_data": report,
        "glue": {"rank": over.rank, "det": _s(over.det), "even": over.is_even(),
                 "signature": list(over.signature)},
        "disc_ns": {"orders": list(ds.orders), "q": [_s(q) for q in ds.q_values]},
        "disc_r": {"orders": list(dr.orders), "q": [_s(q) for q in dr.q_values]},
    }
    pipe.write("verify.json", payload)
    failures = []
    if over.rank != 26 or abs(over.det) != 1 or not over.is_even() \
            or over.signature != (1, 25):
        failures.append("glued overlattice invariants")
    if ds.orders != (12,) or ds.q_values[0] % 2 != Fraction(-1, 12) % 2:
        failures.append("NS discriminant form")
    if dr.orders != (12,) or dr.q_values[0] % 2 != Fraction(1, 12) % 2:
        failures.append("R discriminant form")
    return failures


def cmd_walls(pipe, args):
    scan = pipe.scan
    names = pipe.orbit_names
    rows = []
    for pos, rec in enumerate(scan.wall_orbits):
        rows.append({
            "orbit": f"o{names[pos]}",
            "size": rec.size,
            "n": _s(rec.rep.n),
            "a": _s(rec.rep.a),
            "inner": rec.inner,
            "a32_pairing": _s(rec.a32_pairing),
            "vector": _vec(rec.rep.vector),
            "members": [_vec(w.vector) for w in rec.members],
        })
    rows.sort(key=lambda r: int(r["orbit"][1:]))
    payload = {"wall_count": len(scan.chamber.walls), "orbits": rows}
    pipe.write("walls.json", payload)
    failures = []
    if payload["wall_count"] != pipe.inst.goldens["walls"]["count"]:
        failures.append("wall count")
    want = {e["name"]: e for e in pipe.inst.goldens["walls"]["orbits"]}
    for row in rows:
        g = want[row["orbit"]]
        if row["size"] != g["size"] or row["n"] != g["n"] \
                or Fraction(row["a"]) != g["a"] or row["inner"] != g["inner"] \
                or Fraction(row["a32_pairing"]) != g["a32_pairing"]:
            failures.append(f"orbit {row['orbit']} data")
    return failures


def cmd_aut(pipe, args):
    from .chambers import aut_membership
    from .instance import configuration_automorphisms

    scan = pipe.scan
    cfg = configuration_automorphisms(pipe.inst)
    gens = [
        {"kind": "stabilizer", "matrix": _matrix(g)} for g in scan.aut_d0
    ] + [
        {"kind": "inner-wall", "matrix": _matrix(g)} for g in scan.generators
    ]
    payload = {
        "orbit_count": scan.orbit_count,
        "group_orders": {
            "O_D0": len(scan.o_d0),
            "Aut_D0": len(scan.aut_d0),
            "O_L32": cfg["o_l32"],
            "Aut_L32": cfg["aut_l32"],
        },
        "l32_orbit_sizes": cfg["orbit_sizes"],
        "generators": gens,
    }
    pipe.write("generators.json", payload)
    failures = []
    gg = pipe.inst.goldens["groups"]
    if scan.orbit_count != 1:
        failures.append("chamber orbit count")
    if len(scan.o_d0) != gg["O_D0"] or len(scan.aut_d0) != gg["Aut_D0"]:
        failures.append("chamber stabilizer orders")
    if cfg["o_l32"] != gg["O_L32"] or cfg["aut_l32"] != gg["Aut_L32"]:
        failures.append("curve-configuration group orders")
    if cfg["orbit_sizes"] != gg["L32_orbit_sizes"]:
        failures.append("L32 orbit sizes")
    for g in scan.generators:
        if not aut_membership(pipe.ctx, g):
            failures.append("generator membership")
    return failures


def cmd_census(pipe, args):
    from .instance import low_h8_curves, rats_census

    hist = rats_census(pipe.ctx, max_degree=args.max_degree,
                       threads=pipe.threads)
    os.makedirs(pipe.out_dir, exist_ok=True)
    path = os.path.join(pipe.out_dir, "census.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["degree", "curves"])
        for d in sorted(hist):
            w.writerow([d, hist[d]])
    low = low_h8_curves(pipe.ctx)
    failures = []
    golden = {int(k): v for k, v in pipe.inst.goldens["census"].items()}
    golden.update({int(k): v for k, v in
                   pipe.inst.goldens.get("census_extended", {}).items()})
    for d, n in hist.items():
        if d in golden and golden[d] != n:
            failures.append(f"degree {d}: {n} != {golden[d]}")
    table2 = sorted(tuple(v) for v in pipe.inst.curves.values())
    if sorted(low) != table2:
        failures.append("low-h8 curve set is not the 32 bundled classes")
    return failures


def cmd_fibration(pipe, args):
    from .fibrations import detect_affine_ade, frame_invariants

    configs = pipe.inst.goldens["fibrations"]
    if args.config:
        configs = [c for c in configs if c["name"] == args.config]
        if not configs:
            print(f"unknown fibration config {args.config!r}", file=sys.stderr)
            return ["unknown config"]
    failures = []
    out = []
    for cfg in configs:
        curves = [pipe.inst.curves[n] for n in cfg["component"]]
        types, fiber = detect_affine_ade(pipe.ctx, curves)
        z = pipe.inst.curves[cfg["zero_section"]]
        inv = frame_invariants(pipe.ctx, fiber, z)
        rec = {
            "name": cfg["name"],
            "component_types": types,
            "fiber_class": _vec(fiber),
            "fiber_types": inv["fiber_types"],
            "mw_rank": inv["mw_rank"],
            "mw_torsion": inv["mw_torsion"],
        }
        out.append(rec)
        if inv["fiber_types"] != sorted(cfg["fibers"]) \
                or inv["mw_rank"] != cfg["mw_rank"] \
                or inv["mw_torsion"] != cfg["mw_torsion"]:
            failures.append(cfg["name"])
        if cfg["name"] == "phi0":
            fib = sum(1 for n in pipe.inst.labels
                      if pipe.ctx.pair_s(fiber, pipe.inst.curves[n]) == 0)
            sec = sum(1 for n in pipe.inst.labels
                      if pipe.ctx.pair_s(fiber, pipe.inst.curves[n]) == 1)
            rec["l32_partition"] = {"fibers": fib, "sections": sec}
            want = pipe.inst.goldens["phi0_partition"]
            if fib != want["fibers"] or sec != want["sections"]:
                failures.append("phi0 partition")
    pipe.write("fibrations.json", {"fibrations": out})
    return failures


def cmd_faces(pipe, args):
    from collections import Counter

    lab = pipe.lab
    mu = args.codim
    level = lab.faces_of_codim(mu)
    payload = {
        "codim": mu,
        "count": len(level.keys),
        "orbits": len(level.orbits),
    }
    failures = []
    golden = pipe.inst.goldens["face_counts"].get(str(mu))
    if golden and (payload["count"] != golden[0] or payload["orbits"] != golden[1]):
        failures.append(f"face counts at codim {mu}")
    if args.tau:
        sizes = 0
        orbits = 0
        for oid, rep in level.reps.items():
            if lab.face_type(rep) == args.tau:
                sizes += len(level.orbits[oid])
                orbits += 1
        payload["tau"] = args.tau
        payload["tau_count"] = sizes
        payload["tau_orbits"] = orbits
        for mu_g, tau_g, size_g, orb_g in pipe.inst.goldens["table6"]:
            if mu_g == mu and tau_g == args.tau and (sizes, orbits) != (size_g, orb_g):
                failures.append(f"tau census {args.tau}")
    if mu == 2:
        type_count = Counter()
        type_orbits = Counter()
        angle_rows = {}
        pair_rows = {}
        for oid, rep in level.reps.items():
            cls = lab.classify_codim2(rep)
            type_count[cls["type"]] += len(level.orbits[oid])
            type_orbits[cls["type"]] += 1
            angle_rows.setdefault(cls["type"], set()).add(
                tuple(_s(a) for a in cls["angles"]))
            pair_rows.setdefault(cls["type"], set()).add(cls["wall_pair"])
        payload["types"] = {
            t: {"count": type_count[t], "orbits": type_orbits[t],
                "wall_pairs": sorted(pair_rows[t])}
            for t in sorted(type_count)
        }
        for row in pipe.inst.goldens["codim2_types"]:
            t, cnt, orb = row[0], row[1], row[2]
            if type_count.get(t) != cnt or type_orbits.get(t) != orb:
                failures.append(f"codim-2 type {t}")
    pipe.write(f"faces-{mu}.json", payload)
    return failures


def cmd_ade(pipe, args):
    lab = pipe.lab
    tau = args.tau
    count, nodes, edges = lab.ade_orbit_count(tau)
    payload = {"tau": tau, "orbit_count": count,
               "graph": {"nodes": nodes,
                         "edges": [list(e) for e in sorted(edges)]}}
    pipe.write(f"ade-{tau}.json", payload)
    os.makedirs(os.path.join(pipe.out_dir, "graphs"), exist_ok=True)
    dot = ["graph ade {"]
    for n in nodes:
        dot.append(f"  n{n};")
    for a, b in sorted(edges):
        dot.append(f"  n{a} -- n{b};")
    dot.append("}")
    with open(os.path.join(pipe.out_dir, "graphs", f"ade-{tau}.dot"), "w") as fh:
        fh.write("\n".join(dot) + "\n")
    failures = []
    want = pipe.inst.goldens["ade_orbits"].get(tau)
    if want is not None and count != want:
        failures.append(f"ade orbit count for {tau}: {count} != {want}")
    return failures


def cmd_relations(pipe, args):
    import random

    from .relations import (rel_face_for, rel_triv, verify_relations,
                            word_for_automorphism, word_matrix)

    lab = pipe.lab
    alpha = pipe.alphabet
    rt = rel_triv(alpha)
    n_triv = verify_relations(alpha, rt)
    lv2 = lab.faces_of_codim(2)
    face_rels = []
    rng = random.Random(20260809)
    seeds = [alpha.letters[rng.randrange(len(alpha.g0))] for _ in range(2)]
    for oid, rep in lv2.reps.items():
        if lab.curves_through_face(rep):
            continue
        face_rels.extend(rel_face_for(pipe.ctx, lab, alpha, rep, seeds=seeds))
    n_face = verify_relations(alpha, face_rels)
    roundtrips = 0
    for g in pipe.scan.generators:
        w = word_for_automorphism(pipe.ctx, lab, alpha, g)
        if word_matrix(alpha, w) == tuple(tuple(int(x) for x in r) for r in g):
            roundtrips += 1
    payload = {
        "alphabet": alpha.size,
        "rel_triv_verified": n_triv,
        "rel_face_verified": n_face,
        "rel_face_pairs": [[list(u), list(v)] for u, v in face_rels],
        "generator_roundtrips": roundtrips,
        "letters": [_matrix(m) for m in alpha.letters],
    }
    pipe.write("relations.json", payload)
    failures = []
    if alpha.size != pipe.inst.goldens["groups"]["alphabet"]:
        failures.append("alphabet size")
    if roundtrips != len(pipe.scan.generators):
        failures.append("generator word roundtrips")
    return failures


COMMANDS = {
    "verify": cmd_verify,
    "walls": cmd_walls,
    "aut": cmd_aut,
    "census": cmd_census,
    "fibration": cmd_fibration,
    "faces": cmd_faces,
    "ade": cmd_ade,
    "relations": cmd_relations,
}


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="k3borcherds",
        description="Exact Borcherds-method computations for the bundled "
                    "K3 lattice instance")
    ap.add_argument("--out", default="out", help="output directory")
    ap.add_argument("--check", action="store_true",
                    help="compare against the bundled expected values; "
                         "nonzero exit on mismatch")
    ap.add_argument("--long", action="store_true",
                    help="enable the long tier (codim 4/5 faces)")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--instance", default=None, help="alternate instance file")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("verify")
    sub.add_parser("walls")
    sub.add_parser("aut")
    p = sub.add_parser("census")
    p.add_argument("--max-degree", type=int, default=17)
    p = sub.add_parser("fibration")
    p.add_argument("--config", default=None)
    p = sub.add_parser("faces")
    p.add_argument("--codim", type=int, required=True)
    p.add_argument("--tau", default=None)
    p = sub.add_parser("ade")
    p.add_argument("--tau", required=True)
    sub.add_parser("relations")
    args = ap.parse_args(argv)
    pipe = Pipeline(args.out, threads=args.threads, long_tier=args.long,
                    instance_path=args.instance)
    failures = COMMANDS[args.command](pipe, args)
    if failures:
        print("MISMATCH: " + "; ".join(failures), file=sys.stderr)
        if args.check:
            return 1
    else:
        print("ok", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
