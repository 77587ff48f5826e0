"""thetaring command line.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on bad input.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import product

from . import __version__
from . import monoids as mon
from . import tropical as trop
from .invariants import InvariantTable, UnknownInvariant
from .io import load_geometry, load_presentation, load_table, read_json, resolve
from .presentation import PresentationError, PresentationTable, find_presentation
from .scenario import InputError
from .theta import CheckReport, ThetaRing


class CheckFailed(Exception):
    pass


def _emit(args, data, text):
    if args.format == "json":
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        print(text)


def _geometry(args):
    return load_geometry(args.geometry)


def _table(args, geom):
    """Table choice: --presentation beats --table; default is the shipped <geometry>_table."""
    if getattr(args, "presentation", None):
        return PresentationTable(load_presentation(args.presentation, geom))
    name = args.table
    if name == "none":
        return InvariantTable(policy=args.policy)
    if name is None:
        try:
            resolve(f"{geom.name}_table", ".jsonl")
        except InputError:
            return InvariantTable(policy=args.policy)
        name = f"{geom.name}_table"
    return load_table(name, geom, args.policy)


def _ring(args):
    geom = _geometry(args)
    return ThetaRing(geom, _table(args, geom))


def _points(args, ring):
    pts = ring.geom.points_up_to(args.bound)
    if getattr(args, "sample", None):
        rng = random.Random(args.seed)
        pts = sorted(rng.sample(pts, min(args.sample, len(pts))))
    return pts


def _finish(args, reports):
    _emit(args, {"checks": [r.to_json() for r in reports]}, "\n".join(r.to_text() for r in reports))
    if not all(r.passed for r in reports):
        raise CheckFailed()


# -- ring commands ---------------------------------------------------------------------

def cmd_build(args):
    g = _geometry(args)
    B = g.B
    data = {"name": g.name, "divisors": list(g.labels), "complex": g.full.summary(),
            "skeleton": B.summary(), "h2_rank": g.curves.h2_rank, "flag": g.curves.flag,
            "coefficient_basis": [list(a) for a in g.ring.basis],
            "relative": g.relative is not None}
    text = "\n".join([f"geometry {g.name}", f"divisors: {' '.join(g.labels)}",
                      f"cones: {g.full.summary()['cones']}, skeleton cones: {B.summary()['cones']}",
                      f"H2 rank {g.curves.h2_rank}, flag {g.curves.flag}",
                      f"S_I basis ({len(g.ring.basis)}): " + " ".join(str(list(a)) for a in g.ring.basis)])
    _emit(args, data, text)


def cmd_skeleton(args):
    g = _geometry(args)
    B = g.B
    rows = [{"cone": c, "labels": list(B.cone_labels[c]), "dim": B.dim(c)}
            for c in sorted(B.cone_ids, key=lambda c: (B.dim(c), c))]
    _emit(args, {"cones": rows, "maximal": sorted(B.maximal_cones())},
          "\n".join(f"{r['cone']} dim {r['dim']} [{','.join(r['labels'])}]" for r in rows))


def cmd_points(args):
    g = _geometry(args)
    pts = g.points_up_to(args.bound)
    _emit(args, {"points": [repr(p) for p in pts]}, "\n".join(repr(p) for p in pts))


def cmd_candidates(args):
    ring = _ring(args)
    p1, p2 = ring.geom.point(args.p1), ring.geom.point(args.p2)
    classes = [ring.geom.cls(args.A)] if args.A else list(ring.S.basis)
    out = []
    for a in classes:
        for r in ring.sc.candidate_outputs(p1, p2, a):
            out.append({"A": list(a), "r": repr(r)})
    _emit(args, {"candidates": out}, "\n".join(f"A={c['A']} r={c['r']}" for c in out) or "(none)")


def cmd_multiply(args):
    ring = _ring(args)
    rep = ring.multiply(args.p1, args.p2)
    text = f"theta{{{rep.p1!r}}} * theta{{{rep.p2!r}}} = {rep.result.to_text()}"
    if args.verbose:
        text += "\n" + "\n".join(f"  A={list(c.a)} r={c.r!r} N={c.n} ({c.provenance})"
                                 for c in rep.contributions)
    _emit(args, rep.to_json(), text)


def _assoc_chunk(payload):
    ns, triples = payload
    ring = _ring(argparse.Namespace(**ns))
    rep = CheckReport("associativity")
    for t in triples:
        ring.check_associativity(*t, rep)
    return rep.checked, rep.failures


def cmd_assoc(args):
    ring = _ring(args)
    if args.p1 or args.p2 or args.p3:
        if not (args.p1 and args.p2 and args.p3):
            raise InputError("give all of --p1 --p2 --p3, or none of them")
        triples = [(args.p1, args.p2, args.p3)]
    else:
        pts = _points(args, ring)
        triples = [tuple(repr(p) for p in t) for t in product(pts, repeat=3)]
    rep = CheckReport("associativity")
    if args.jobs > 1 and len(triples) > 1:
        ns = {k: v for k, v in vars(args).items() if k != "func"}
        chunks = [triples[i::args.jobs] for i in range(args.jobs)]
        with ProcessPoolExecutor(args.jobs) as ex:
            results = list(ex.map(_assoc_chunk, [(ns, c) for c in chunks]))
        for n, fails in results:
            rep.checked += n
            rep.failures.extend(fails)
        rep.failures.sort()
    else:
        for t in triples:
            ring.check_associativity(*t, rep)
    _finish(args, [rep])


def cmd_unit(args):
    ring = _ring(args)
    pts = _points(args, ring)
    _finish(args, [ring.check_unit(pts), ring.check_commutativity(pts)])


def cmd_grading(args):
    ring = _ring(args)
    reps = ring.products(_points(args, ring))
    _finish(args, [ring.check_torus_grading(reps), ring.check_degree_grading(reps)])


def _parse_s(spec):
    s = {}
    for part in spec.split(","):
        if part.strip():
            k, v = part.split("=")
            s[k.strip()] = Fraction(v.strip())
    return s


def cmd_rees(args):
    ring = _ring(args)
    s = _parse_s(args.s) if args.s else ring.geom.rees_s
    if not s:
        raise InputError("no Rees functional: pass --s D=1,...")
    reps = ring.products(_points(args, ring))
    rep, gens = ring.rees(s, reps, args.bound)
    if args.format == "json":
        print(json.dumps({"check": rep.to_json(), "generators": [[d, repr(p)] for d, p in gens]},
                         indent=2, sort_keys=True))
    else:
        print(rep.to_text())
        print(f"Rees module generators z^d theta_p up to {args.bound}: {len(gens)}")
    if not rep.passed:
        raise CheckFailed()


def cmd_presentation(args):
    geom = _geometry(args)
    if args.action == "find":
        ring = ThetaRing(geom, _table(args, geom))
        gens = args.gens.split(",")
        fp = find_presentation(ring, gens, args.bound, names=gens)
        pres = fp.presentation
        data = {"defining": [pres.relation_text(r) for r in fp.defining],
                "identifications": [pres.relation_text(r) for r in fp.identifications]}
        text = "\n".join([f"defining relations ({len(fp.defining)}):"]
                         + [f"  {x}" for x in data["defining"]]
                         + [f"identifications ({len(fp.identifications)}):"]
                         + [f"  {x}" for x in data["identifications"]])
        _emit(args, data, text)
        return
    if not args.file:
        raise InputError("--file is required for eval and confluence")
    pres = load_presentation(args.file, geom)
    if args.action == "eval":
        if not args.word:
            raise InputError("--word is required")
        word = []
        for item in args.word.split("*"):
            word += pres.theta_word(geom.point(item.strip()))
        val = pres.eval_checked(word)
        _emit(args, {"word": args.word, "value": val.to_json()}, val.to_text())
    else:
        n = pres.check_confluence(args.bound)
        _emit(args, {"confluent": True, "words": n}, f"confluent on {n} words up to degree {args.bound}")


# -- tropical ---------------------------------------------------------------------------

def cmd_trop(args):
    fam = trop.family_from_json(read_json(args.family))
    if args.action == "validate":
        rep = trop.validate_family(fam)
        _emit(args, rep.to_json(), "valid" if rep.valid else "invalid\n" + "\n".join(f"  {i}" for i in rep.issues))
        if not rep.valid:
            raise CheckFailed()
        return
    rep = trop.validate_family(fam)
    if not rep.valid:
        raise InputError("invalid family: " + "; ".join(rep.issues))
    if args.action == "classify":
        data = {"boundary_class": trop.boundary_class(fam), "terminal_tail": trop.has_terminal_tail(fam)}
        try:
            data["tails"] = trop.classify_tails(fam)
            data["splitting_edges"] = trop.splitting_edges(fam)
        except trop.AssumptionViolation as e:
            data["tails"] = None
            data["note"] = str(e)
        text = "\n".join(f"{k}: {v}" for k, v in data.items())
        _emit(args, data, text)
    elif args.action == "ucone":
        uc = trop.universal_cone(fam)
        data = {"dimension": uc.dim, "variables": uc.variables,
                "equations": [list(e) for e in uc.cone.equations],
                "rays": [list(r) for r in uc.cone.rays],
                "base_dimension": trop.base_dim(fam), "miniversal": trop.is_miniversal(fam)}
        _emit(args, data, f"universal cone dimension {uc.dim} (base {data['base_dimension']}); "
                          f"miniversal: {data['miniversal']}")
    else:
        res = trop.find_splitting_edge(fam)
        f1, f2 = trop.split_at_edge(fam, res.index)
        data = {"edge": res.index, "properties": res.to_json(), "beta1": f1.to_json(), "beta2": f2.to_json()}
        text = "\n".join([f"splitting edge E_{res.index}",
                          f"beta1 legs: {', '.join(f'{l.name}={list(l.u)}' for l in f1.legs)}",
                          f"beta2 legs: {', '.join(f'{l.name}={list(l.u)}' for l in f2.legs)}"])
        _emit(args, data, text)


# -- monoids -----------------------------------------------------------------------------

def _vecs(spec):
    return [tuple(int(x) for x in part.split(",")) for part in spec.split(";") if part.strip()]


def _monoid(d):
    return mon.ToricMonoid.from_json(d)


def cmd_monoid(args):
    if args.action in ("saturate", "hilbert"):
        gens = _vecs(args.gens)
        q = mon.ToricMonoid(gens, len(gens[0]))
        s = mon.saturate(q)
        data = {"saturated": q.is_saturated, "hilbert_basis": [list(h) for h in s.hilbert_basis]}
        _emit(args, data, f"saturated: {q.is_saturated}\nHilbert basis of saturation: "
                          + " ".join(str(list(h)) for h in s.hilbert_basis))
    elif args.action == "length":
        gens = _vecs(args.gens)
        q = mon.ToricMonoid(gens, len(gens[0]))
        k = mon.MonoidIdeal(q, _vecs(args.ideal))
        n = mon.quotient_length(q, k)
        _emit(args, {"length": n if isinstance(n, int) else str(n)}, f"length {n}")
    else:
        d = read_json(args.file)
        if args.action == "pushout":
            q = _monoid(d["Q"])
            h1 = mon.MonoidHom(q, _monoid(d["P1"]), d["h1"])
            h2 = mon.MonoidHom(q, _monoid(d["P2"]), d["h2"])
            p = mon.fs_pushout(h1, h2)
            _emit(args, p.to_json(), "fs pushout Hilbert basis: " + " ".join(str(list(h)) for h in p.hilbert_basis))
        else:
            theta = mon.MonoidHom(_monoid(d["source"]), _monoid(d["target"]), d["matrix"])
            ok = mon.is_integral(theta)
            _emit(args, {"integral": ok}, f"integral: {ok}")


# -- parser --------------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="thetaring", description="Structure constants and checks for theta rings.")
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1)
    geo = argparse.ArgumentParser(add_help=False)
    geo.add_argument("--geometry", "-g", default="blowup", help="fixture name or JSON path")
    tab = argparse.ArgumentParser(add_help=False)
    tab.add_argument("--table", help="fixture name or JSONL path; 'none' for an empty table")
    tab.add_argument("--presentation", help="derive the table from a presentation file")
    tab.add_argument("--policy", choices=("strict", "complete"), default="complete")
    bnd = argparse.ArgumentParser(add_help=False)
    bnd.add_argument("--bound", type=int, default=3)
    bnd.add_argument("--sample", type=int, help="check a seeded random subset of this size")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, parents, help_):
        sp = sub.add_parser(name, parents=[common] + parents, help=help_)
        sp.set_defaults(func=func)
        return sp
    add("build", cmd_build, [geo], "load and cross-validate a geometry")
    add("skeleton", cmd_skeleton, [geo], "list the cones of the skeleton B")
    add("points", cmd_points, [geo, bnd], "enumerate integral points of B up to a degree")
    sp = add("candidates", cmd_candidates, [geo, tab], "outputs r allowed by the pairing constraints")
    sp.add_argument("--p1", required=True)
    sp.add_argument("--p2", required=True)
    sp.add_argument("--A")
    sp = add("multiply", cmd_multiply, [geo, tab], "product of two theta functions")
    sp.add_argument("--p1", required=True)
    sp.add_argument("--p2", required=True)
    sp.add_argument("--verbose", "-v", action="store_true")
    sp = add("assoc", cmd_assoc, [geo, tab, bnd], "associativity identity")
    for k in ("--p1", "--p2", "--p3"):
        sp.add_argument(k)
    add("unit", cmd_unit, [geo, tab, bnd], "unit and commutativity checks")
    add("grading", cmd_grading, [geo, tab, bnd], "torus and degree grading checks")
    sp = add("rees", cmd_rees, [geo, tab, bnd], "Rees filtration inequality")
    sp.add_argument("--s", help="functional as D=value,...")
    sp = add("presentation", cmd_presentation, [geo, tab], "find, evaluate or check presentations")
    sp.add_argument("action", choices=("find", "eval", "confluence"))
    sp.add_argument("--gens", default="v1,v2,v3")
    sp.add_argument("--bound", type=int, default=3)
    sp.add_argument("--file")
    sp.add_argument("--word", help="points joined by '*'")
    sp = add("trop", cmd_trop, [], "tropical families")
    sp.add_argument("action", choices=("validate", "classify", "split", "ucone"))
    sp.add_argument("family", help="fixture name or JSON path")
    sp = add("monoid", cmd_monoid, [], "toric monoid utilities")
    sp.add_argument("action", choices=("saturate", "hilbert", "length", "pushout", "integral"))
    sp.add_argument("--gens", help="generators as 'a,b;c,d'")
    sp.add_argument("--ideal", help="ideal generators as 'a,b;c,d'")
    sp.add_argument("--file", help="JSON input for pushout and integral")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except CheckFailed:
        return 1
    except (trop.NonUniqueSplitting,) as e:
        print(f"check failed: {e}", file=sys.stderr)
        return 1
    except (InputError, UnknownInvariant, PresentationError, trop.TropicalError,
            mon.MonoidError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
