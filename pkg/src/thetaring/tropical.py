"""Four-pointed genus-0 tropical families over a base cone, their spine and tails,
splitting edges, universal deformation cones, and cone-level transversality."""
from __future__ import annotations

import copy
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from . import linalg as la
from .complex import ComplexError, ConeComplex, StrataPoset, build_complex
from .cones import Cone
from .monoids import ToricMonoid


class TropicalError(ValueError):
    pass


class AssumptionViolation(TropicalError):
    pass


class NonUniqueSplitting(TropicalError):
    def __init__(self, indices):
        super().__init__(f"several edges are tangent to the next image cone: {indices}")
        self.indices = indices


X_LEGS = ("x1", "x2", "x3")
OUT = "out"


@dataclass
class Edge:
    id: str
    a: str                  # oriented a -> b; u points from a to b
    b: str
    u: tuple
    bsigma: str
    length: tuple


@dataclass
class Leg:
    name: str
    vertex: str
    u: tuple
    bsigma: str
    length: tuple | None = None          # bounded legs created by splitting
    glue: dict | None = None


@dataclass
class TropFamily:
    cx: ConeComplex
    vertices: tuple
    vertex_cone: dict
    edges: list
    legs: list
    base: ToricMonoid
    nu: dict                # vertex -> integer matrix (labels x base rank)
    delta: tuple | None = None
    r: tuple | None = None
    name: str = "family"
    complex_spec: object = None

    @property
    def labels(self):
        return self.cx.labels

    @property
    def k(self) -> int:
        return self.base.n

    def leg(self, name) -> Leg:
        for l in self.legs:
            if l.name == name:
                return l
        raise TropicalError(f"no leg {name}")

    def edge(self, eid) -> Edge:
        for e in self.edges:
            if e.id == eid:
                return e
        raise TropicalError(f"no edge {eid}")

    @property
    def omega_rays(self) -> list:
        """Extreme rays (and lineality) of Hom(Q, R>=0) in base coordinates."""
        d = self.base.cone.dual()
        return list(d.rays) + list(d.lineality) + [la.scale(-1, l) for l in d.lineality]

    def nu_at(self, v, m) -> tuple:
        return la.matvec(self.nu[v], m)

    # -- serialization --------------------------------------------------------------
    def to_json(self) -> dict:
        d = {"name": self.name,
             "complex": self.complex_spec,
             "graph": {"vertices": list(self.vertices),
                       "edges": [{"id": e.id, "from": e.a, "to": e.b} for e in self.edges],
                       "legs": [{"name": l.name, "vertex": l.vertex} for l in self.legs]},
             "bsigma": {**{v: self.vertex_cone[v] for v in self.vertices},
                        **{e.id: e.bsigma for e in self.edges},
                        **{l.name: l.bsigma for l in self.legs}},
             "u": {**{e.id: list(e.u) for e in self.edges}, **{l.name: list(l.u) for l in self.legs}},
             "base": self.base.to_json(),
             "nu": {v: [list(r) for r in self.nu[v]] for v in self.vertices},
             "lengths": {e.id: list(e.length) for e in self.edges}}
        bounded = {l.name: list(l.length) for l in self.legs if l.length is not None}
        if bounded:
            d["leg_lengths"] = bounded
        glue = {l.name: l.glue for l in self.legs if l.glue is not None}
        if glue:
            d["glue"] = glue
        if self.delta is not None:
            d["delta"] = list(self.delta)
        if self.r is not None:
            d["r"] = list(self.r)
        return d

    def canonical(self) -> str:
        d = self.to_json()
        d.pop("name")
        d["graph"]["vertices"] = sorted(d["graph"]["vertices"])
        d["graph"]["edges"] = sorted(d["graph"]["edges"], key=lambda e: e["id"])
        d["graph"]["legs"] = sorted(d["graph"]["legs"], key=lambda l: l["name"])
        return json.dumps(d, sort_keys=True)


def _complex_from_spec(spec):
    if isinstance(spec, str):
        from .io import read_json
        spec = read_json(spec)
    return build_complex(StrataPoset.from_json(spec))


def family_from_json(d: dict, cx: ConeComplex | None = None) -> TropFamily:
    try:
        cx = cx or _complex_from_spec(d["complex"])
        n = len(cx.labels)
        g = d["graph"]
        bs, us = d["bsigma"], d["u"]
        vec = lambda v, size: tuple(int(x) for x in v) if len(v) == size else _bad(f"vector {v} needs length {size}")
        base = ToricMonoid.from_json(d["base"])
        edges = [Edge(str(e["id"]), str(e["from"]), str(e["to"]), vec(us[e["id"]], n), str(bs[e["id"]]),
                      vec(d["lengths"][e["id"]], base.n)) for e in g["edges"]]
        ll = d.get("leg_lengths", {})
        legs = [Leg(str(l["name"]), str(l["vertex"]), vec(us[l["name"]], n), str(bs[l["name"]]),
                    vec(ll[l["name"]], base.n) if l["name"] in ll else None,
                    d.get("glue", {}).get(l["name"])) for l in g["legs"]]
        verts = tuple(str(v) for v in g["vertices"])
        nu = {}
        for v in verts:
            m = d["nu"][v]
            if len(m) != n or any(len(row) != base.n for row in m):
                raise TropicalError(f"nu[{v}] must be {n} x {base.n}")
            nu[v] = tuple(tuple(int(x) for x in row) for row in m)
        return TropFamily(cx, verts, {v: str(bs[v]) for v in verts}, edges, legs, base, nu,
                          vec(d["delta"], base.n) if d.get("delta") is not None else None,
                          vec(d["r"], n) if d.get("r") is not None else None,
                          d.get("name", "family"), d.get("complex"))
    except KeyError as e:
        raise TropicalError(f"missing field {e}") from e


def _bad(msg):
    raise TropicalError(msg)


# -- validation ------------------------------------------------------------------------

@dataclass
class ValidationReport:
    issues: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.issues

    def to_json(self):
        return {"valid": self.valid, "issues": self.issues}


def _in_cone(cx: ConeComplex, cone: str, x) -> bool:
    ls = set(cx.cone_labels[cone])
    return all(v >= 0 and (v == 0 or l in ls) for l, v in zip(cx.labels, x))


def _supported(cx: ConeComplex, cone: str, x) -> bool:
    ls = set(cx.cone_labels[cone])
    return all(v == 0 or l in ls for l, v in zip(cx.labels, x))


def _adjacency(fam):
    adj = {v: [] for v in fam.vertices}
    for e in fam.edges:
        adj[e.a].append((e.b, e))
        adj[e.b].append((e.a, e))
    return adj


def validate_family(fam: TropFamily) -> ValidationReport:
    rep = ValidationReport()
    issue = rep.issues.append
    cx = fam.cx
    verts = set(fam.vertices)
    if len(verts) != len(fam.vertices):
        issue("duplicate vertex names")
    names = [e.id for e in fam.edges] + [l.name for l in fam.legs]
    if len(set(names)) != len(names) or verts & set(names):
        issue("edge, leg and vertex names must be distinct")
    for e in fam.edges:
        if e.a not in verts or e.b not in verts:
            issue(f"edge {e.id} has an unknown endpoint")
    for l in fam.legs:
        if l.vertex not in verts:
            issue(f"leg {l.name} sits on an unknown vertex")
    if rep.issues:
        return rep
    if len(fam.edges) != len(fam.vertices) - 1:
        issue("graph is not a tree (|E| != |V| - 1)")
    adj = _adjacency(fam)
    seen, stack = {fam.vertices[0]}, [fam.vertices[0]]
    while stack:
        for w, _ in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if seen != verts:
        issue("graph is not connected")
    if sum(l.name == OUT for l in fam.legs) != 1:
        issue("exactly one leg must be named 'out'")
    for key, cone in [(v, fam.vertex_cone[v]) for v in fam.vertices] + \
                     [(e.id, e.bsigma) for e in fam.edges] + [(l.name, l.bsigma) for l in fam.legs]:
        if cone not in cx.cone_labels:
            issue(f"{key}: unknown cone {cone}")
    if rep.issues:
        return rep
    rays = fam.omega_rays
    base_cone = fam.base.cone
    for v in fam.vertices:
        for m in rays:
            if not _in_cone(cx, fam.vertex_cone[v], fam.nu_at(v, m)):
                issue(f"nu[{v}] sends {list(m)} outside cone {fam.vertex_cone[v]}")
    for e in fam.edges:
        for v in (e.a, e.b):
            if not cx.is_face(fam.vertex_cone[v], e.bsigma):
                issue(f"edge {e.id}: cone of {v} is not a face of {e.bsigma}")
        if not _supported(cx, e.bsigma, e.u):
            issue(f"edge {e.id}: u not tangent to {e.bsigma}")
        if not any(e.length) or not fam.base.contains(e.length):
            issue(f"edge {e.id}: length must be a nonzero element of Q")
        want = [[x - y for x, y in zip(rb, ra)] for rb, ra in zip(fam.nu[e.b], fam.nu[e.a])]
        got = [[ui * lj for lj in e.length] for ui in e.u]
        if want != got:
            issue(f"edge {e.id}: nu[{e.b}] - nu[{e.a}] != l_E (x) u")
    for l in fam.legs:
        if not cx.is_face(fam.vertex_cone[l.vertex], l.bsigma):
            issue(f"leg {l.name}: cone of {l.vertex} is not a face of {l.bsigma}")
        if not _supported(cx, l.bsigma, l.u):
            issue(f"leg {l.name}: u not tangent to {l.bsigma}")
        if l.name != OUT and l.length is None and not _in_cone(cx, l.bsigma, l.u):
            issue(f"leg {l.name}: unbounded leg leaves {l.bsigma}")
        if l.length is not None and not fam.base.contains(l.length):
            issue(f"leg {l.name}: length must lie in Q")
    if fam.delta is not None and not fam.base.contains(fam.delta):
        issue("delta must lie in Q")
    if fam.r is not None:
        out = fam.leg(OUT)
        if tuple(-x for x in out.u) != tuple(fam.r):
            issue("u(out) must equal -r")
        if fam.delta is not None:
            want = tuple(tuple(ri * dj for dj in fam.delta) for ri in fam.r)
            if fam.nu[out.vertex] != want:
                issue("nu at the out vertex must equal delta (x) r")
    return rep


def _require_valid(fam):
    rep = validate_family(fam)
    if not rep.valid:
        raise TropicalError("invalid family: " + "; ".join(rep.issues))


# -- spine and classification -------------------------------------------------------------

@dataclass
class Spine:
    vertices: frozenset
    edges: frozenset
    branch: tuple              # vertices of valence >= 3 in the spine
    leg_branch: dict           # leg name -> branch vertex its topological leg ends at


def spine(fam: TropFamily) -> Spine:
    adj = _adjacency(fam)
    leg_at = {}
    for l in fam.legs:
        leg_at.setdefault(l.vertex, []).append(l.name)
    keep = set(fam.vertices)
    edges = {e.id for e in fam.edges}
    changed = True
    while changed:
        changed = False
        for v in list(keep):
            nb = [(w, e) for w, e in adj[v] if w in keep and e.id in edges]
            if not leg_at.get(v) and len(nb) <= 1:
                keep.discard(v)
                for _, e in nb:
                    edges.discard(e.id)
                changed = True
    val = {v: len(leg_at.get(v, [])) + sum(1 for w, e in adj[v] if e.id in edges) for v in keep}
    branch = tuple(sorted(v for v in keep if val[v] >= 3))
    leg_branch = {}
    for l in fam.legs:
        prev, cur = None, l.vertex
        while cur not in branch:
            nxt = [w for w, e in adj[cur] if e.id in edges and w != prev]
            if len(nxt) != 1:
                break
            prev, cur = cur, nxt[0]
        leg_branch[l.name] = cur
    return Spine(frozenset(keep), frozenset(edges), branch, leg_branch)


def boundary_class(fam: TropFamily) -> str:
    sp = spine(fam)
    xs = sorted(l.name for l in fam.legs if l.name != OUT)
    if len(xs) != 3:
        raise TropicalError("boundary classes need legs x1, x2, x3 and out")
    if len(sp.branch) == 2:
        v = sp.leg_branch[OUT]
        far = sorted(n for n in xs if sp.leg_branch[n] != v)
        near = [n for n in xs if sp.leg_branch[n] == v]
        return f"D({''.join(far)}|{','.join(near + [OUT])})"
    if len(sp.branch) == 1:
        b = sp.branch[0]
        if fam.leg(OUT).vertex != b and all(fam.leg(n).vertex == b for n in xs):
            return f"D({''.join(xs)}|{OUT})"
        return "interior"
    raise TropicalError("spine has no branch vertex")


@dataclass
class Chain:
    vertices: list             # v = v_1, ..., v_n = w
    edges: list                # E_i oriented v_i -> v_{i+1}: (edge, u_i)


def chain(fam: TropFamily) -> Chain:
    sp = spine(fam)
    if len(sp.branch) != 2:
        raise AssumptionViolation("the spine does not have two trivalent vertices")
    v = sp.leg_branch[OUT]
    w = next(b for b in sp.branch if b != v)
    adj = _adjacency(fam)
    path = {v: (None, None)}
    stack = [v]
    while stack:
        x = stack.pop()
        for y, e in adj[x]:
            if y not in path:
                path[y] = (x, e)
                stack.append(y)
    verts, edges = [w], []
    cur = w
    while cur != v:
        prev, e = path[cur]
        u = e.u if (e.a, e.b) == (prev, cur) else tuple(-x for x in e.u)
        edges.append((e, u))
        verts.append(prev)
        cur = prev
    return Chain(verts[::-1], edges[::-1])


def has_terminal_tail(fam: TropFamily) -> bool:
    sp = spine(fam)
    if len(sp.branch) != 2:
        return False
    return fam.leg(OUT).vertex != sp.leg_branch[OUT]


def _need_delta(fam):
    if fam.delta is None:
        raise TropicalError("delta is required")


def splitting_edges(fam: TropFamily) -> list:
    """1-based chain indices i with l_i, delta linearly independent."""
    _need_delta(fam)
    ch = chain(fam)
    return [i for i, (e, _) in enumerate(ch.edges, 1) if la.rank([e.length, fam.delta]) == 2]


def classify_tails(fam: TropFamily) -> str:
    cls = boundary_class(fam)
    if not cls.startswith("D(") or cls.endswith(f"|{OUT})"):
        raise AssumptionViolation(f"tails are defined for two-sided boundary classes, got {cls}")
    if has_terminal_tail(fam):
        return "terminal"
    s = splitting_edges(fam)
    if not s:
        raise AssumptionViolation("every l_i is proportional to delta: image condition (3) fails")
    return "tail_free" if len(s) == 1 else "internal"


# -- universal cone ---------------------------------------------------------------------

@dataclass
class UniversalCone:
    cone: Cone
    dim: int
    variables: list
    tautological: list         # rows: variables, columns: base coordinates

    @property
    def tautological_rank(self) -> int:
        return la.rank(la.transpose(self.tautological, len(self.tautological[0]))) if self.tautological else 0


def universal_cone(fam: TropFamily) -> UniversalCone:
    cx = fam.cx
    idx = {}
    for v in fam.vertices:
        for l in cx.cone_labels[fam.vertex_cone[v]]:
            idx[("h", v, l)] = len(idx)
    for e in fam.edges:
        idx[("l", e.id)] = len(idx)
    idx[("delta",)] = len(idx)
    n = len(idx)

    def h(v, lab):
        return idx.get(("h", v, lab))
    eqs = []
    for e in fam.edges:
        for j, lab in enumerate(cx.labels):
            row = [0] * n
            if h(e.b, lab) is not None:
                row[h(e.b, lab)] += 1
            if h(e.a, lab) is not None:
                row[h(e.a, lab)] -= 1
            row[idx[("l", e.id)]] -= e.u[j]
            if any(row):
                eqs.append(tuple(row))
    if fam.r is not None:
        vout = fam.leg(OUT).vertex
        for j, lab in enumerate(cx.labels):
            row = [0] * n
            if h(vout, lab) is not None:
                row[h(vout, lab)] += 1
            row[idx[("delta",)]] -= fam.r[j]
            if any(row):
                eqs.append(tuple(row))
    ineqs = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    cone = Cone.from_inequalities(ineqs, n, eqs)
    taut = [None] * n
    for key, i in idx.items():
        if key[0] == "h":
            taut[i] = list(fam.nu[key[1]][cx.labels.index(key[2])])
        elif key[0] == "l":
            taut[i] = list(fam.edge(key[1]).length)
        else:
            taut[i] = list(fam.delta) if fam.delta is not None else [0] * fam.k
    names = [":".join(map(str, k)) for k in sorted(idx, key=idx.get)]
    return UniversalCone(cone, cone.dim, names, taut)


def base_dim(fam: TropFamily) -> int:
    return fam.base.cone.dual().dim


def is_miniversal(fam: TropFamily) -> bool:
    uc = universal_cone(fam)
    d = base_dim(fam)
    return uc.dim == d and uc.tautological_rank == d


def image_condition(fam: TropFamily) -> bool:
    """The image of (l, delta) is a 2-dimensional cone containing l*."""
    _need_delta(fam)
    ell = [0] * fam.k
    for e, _ in chain(fam).edges:
        ell = la.add(ell, e.length)
    img = Cone([(la.dot(ell, m), la.dot(fam.delta, m)) for m in fam.omega_rays] or [(0, 0)], 2)
    return img.dim == 2 and img.contains((1, 0))


def _tangent(u, nu_matrix, rays) -> bool:
    span = [la.matvec(nu_matrix, m) for m in rays]
    span = [s for s in span if any(s)]
    if not span:
        return not any(u)
    return la.in_span(u, span)


@dataclass
class SplittingResult:
    index: int
    proportional_before: bool
    independent: bool
    u_in_cone: bool

    def to_json(self):
        return {"index": self.index, "l_j_proportional_to_delta_for_j_lt_i": self.proportional_before,
                "l_i_independent_of_delta": self.independent, "u_i_in_bsigma": self.u_in_cone}


def check_assumptions(fam: TropFamily) -> list:
    """Reasons the splitting statement does not apply (empty list if it does)."""
    bad = []
    rep = validate_family(fam)
    if not rep.valid:
        return ["invalid family: " + "; ".join(rep.issues)]
    if fam.delta is None:
        return ["delta is required"]
    try:
        cls = boundary_class(fam)
    except TropicalError as e:
        return [str(e)]
    if not cls.startswith("D(") or cls.endswith(f"|{OUT})"):
        return [f"boundary class {cls} is not two-sided"]
    if base_dim(fam) != 2:
        bad.append("base cone is not two-dimensional")
    if not is_miniversal(fam):
        bad.append("family is not miniversal")
    if not image_condition(fam):
        bad.append("image of (l, delta) is not a 2-dimensional cone containing l*")
    if has_terminal_tail(fam):
        bad.append("terminal tail")
    return bad


def find_splitting_edge(fam: TropFamily) -> SplittingResult:
    bad = check_assumptions(fam)
    if bad:
        raise AssumptionViolation("; ".join(bad))
    ch = chain(fam)
    rays = fam.omega_rays
    hits = [i for i, (e, u) in enumerate(ch.edges, 1)
            if _tangent(u, fam.nu[ch.vertices[i]], rays)]
    if len(hits) != 1:
        raise NonUniqueSplitting(hits)
    i = hits[0]
    e, u = ch.edges[i - 1]
    res = SplittingResult(
        i,
        all(la.rank([ch.edges[j][0].length, fam.delta]) <= 1 for j in range(i - 1)),
        la.rank([e.length, fam.delta]) == 2,
        _in_cone(fam.cx, e.bsigma, u))
    if not (res.proportional_before and res.independent and res.u_in_cone):
        raise TropicalError(f"splitting edge {i} fails its properties: {res.to_json()}")
    return res


# -- splitting and regluing ----------------------------------------------------------------

def split_at_edge(fam: TropFamily, i: int):
    """Cut chain edge E_i: (family with x-legs beyond E_i and new out leg -s,
    family with the new leg s, the remaining x-leg and out)."""
    _need_delta(fam)
    ch = chain(fam)
    if not 1 <= i <= len(ch.edges):
        raise TropicalError(f"chain has no edge {i}")
    e, u = ch.edges[i - 1]
    if la.rank([e.length, fam.delta]) != 2:
        raise TropicalError(f"edge E_{i} is not of splitting type")
    near, far = ch.vertices[i - 1], ch.vertices[i]
    adj = _adjacency(fam)
    side = {far}
    stack = [far]
    while stack:
        x = stack.pop()
        for y, f in adj[x]:
            if f.id != e.id and y not in side:
                side.add(y)
                stack.append(y)
    meta = {"edge": e.id, "from": e.a, "to": e.b, "u": list(e.u), "position": fam.edges.index(e)}

    def part(vs, legs, r, delta, name):
        return TropFamily(fam.cx, tuple(v for v in fam.vertices if v in vs),
                          {v: fam.vertex_cone[v] for v in vs},
                          [f for f in fam.edges if f.a in vs and f.b in vs and f.id != e.id],
                          legs, fam.base, {v: fam.nu[v] for v in vs}, delta, r, name, fam.complex_spec)
    s = tuple(u)
    legs1 = [copy.copy(l) for l in fam.legs if l.vertex in side] + \
            [Leg(OUT, far, tuple(-x for x in s), e.bsigma, e.length, meta)]
    legs2 = [copy.copy(l) for l in fam.legs if l.vertex not in side] + \
            [Leg("s", near, s, e.bsigma, e.length, meta)]
    if any(l.name == "s" for l in fam.legs):
        raise TropicalError("leg name 's' is reserved for splitting")
    f1 = part(side, legs1, s, None, fam.name + "/beta1")
    f2 = part(set(fam.vertices) - side, legs2, fam.r, fam.delta, fam.name + "/beta2")
    for f in (f1, f2):
        rep = validate_family(f)
        if not rep.valid:
            raise TropicalError(f"split part {f.name} is invalid: {'; '.join(rep.issues)}")
    return f1, f2


def glue(f1: TropFamily, f2: TropFamily, name: str = "family") -> TropFamily:
    l1 = next(l for l in f1.legs if l.glue is not None)
    l2 = next(l for l in f2.legs if l.glue is not None and l.glue["edge"] == l1.glue["edge"])
    meta = l2.glue
    edge = Edge(meta["edge"], meta["from"], meta["to"], tuple(meta["u"]), l2.bsigma, l2.length)
    edges = f1.edges + f2.edges
    edges.insert(min(meta["position"], len(edges)), edge)
    legs = [l for l in f1.legs + f2.legs if l.glue is None]
    return TropFamily(f1.cx, f1.vertices + f2.vertices, {**f1.vertex_cone, **f2.vertex_cone}, edges,
                      legs, f1.base, {**f1.nu, **f2.nu}, f2.delta, f2.r, name, f1.complex_spec)


# -- random families in a fixed complex -------------------------------------------------------

def _cone_with(cx: ConeComplex, labels):
    labels = set(labels)
    best = None
    for c in cx.cone_ids:
        if labels <= set(cx.cone_labels[c]):
            if best is None or cx.dim(c) < cx.dim(best):
                best = c
    return best


def _support(cx, x):
    return {l for l, v in zip(cx.labels, x) if v}


def random_chain_family(rng: random.Random, cx: ConeComplex, max_edges: int = 3, coord: int = 3):
    """A four-pointed chain family over Q = N^2 with v_out = v; None if the draw is not a family."""
    n = len(cx.labels)
    k = 2
    delta = rng.choice([(0, 1), (1, 0), (1, 1), (0, 2)])
    pts = [tuple(rng.randint(0, 1) * rng.randint(1, 2) for _ in range(n)) for _ in range(4)]
    r = pts[0]
    if _cone_with(cx, _support(cx, r)) is None:
        return None
    m = rng.randint(1, max_edges)
    nu = [tuple(tuple(ri * dj for dj in delta) for ri in r)]
    edges = []
    vcones = [_cone_with(cx, _support(cx, r))]
    for i in range(m):
        for _ in range(50):
            length = (0, 0)
            if i < m - 1 and rng.random() < 0.6:
                length = tuple(rng.randint(1, 2) * d for d in delta)
            while not any(length):
                length = (rng.randint(0, coord), rng.randint(0, coord))
            # u supported on a random maximal cone through the current vertex cone
            sigma = rng.choice([c for c in cx.maximal_cones() if cx.is_face(vcones[-1], c)])
            ls = set(cx.cone_labels[sigma])
            u = tuple(rng.randint(-coord, coord) if l in ls and rng.random() < 0.7 else 0 for l in cx.labels)
            nxt = tuple(tuple(a + ui * lj for a, lj in zip(row, length)) for row, ui in zip(nu[-1], u))
            if any(x < 0 for row in nxt for x in row):
                continue
            c = _cone_with(cx, {l for l, row in zip(cx.labels, nxt) if any(row)})
            if c is not None:
                break
        else:
            return None
        nu.append(nxt)
        vcones.append(c)
        edges.append((u, length))
    names = [f"v{i + 1}" for i in range(m + 1)]
    ecs = []
    for i, (u, _) in enumerate(edges):
        c = _cone_with(cx, set(cx.cone_labels[vcones[i]]) | set(cx.cone_labels[vcones[i + 1]]) | _support(cx, u))
        if c is None:
            return None
        ecs.append(c)
    legs = []
    for name, vi, p in (("out", 0, tuple(-x for x in r)), ("x3", 0, pts[1]), ("x1", m, pts[2]), ("x2", m, pts[3])):
        c = _cone_with(cx, set(cx.cone_labels[vcones[vi]]) | _support(cx, p))
        if c is None:
            return None
        legs.append({"name": name, "vertex": names[vi], "u": list(p), "bsigma": c})
    d = {"name": "random",
         "graph": {"vertices": names,
                   "edges": [{"id": f"E{i + 1}", "from": names[i], "to": names[i + 1]} for i in range(m)],
                   "legs": [{"name": l["name"], "vertex": l["vertex"]} for l in legs]},
         "bsigma": {**dict(zip(names, vcones)), **{f"E{i + 1}": c for i, c in enumerate(ecs)},
                    **{l["name"]: l["bsigma"] for l in legs}},
         "u": {**{f"E{i + 1}": list(u) for i, (u, _) in enumerate(edges)}, **{l["name"]: l["u"] for l in legs}},
         "base": {"rank": k, "generators": [[1, 0], [0, 1]]},
         "nu": {nm: [list(row) for row in mat] for nm, mat in zip(names, nu)},
         "lengths": {f"E{i + 1}": list(l) for i, (_, l) in enumerate(edges)},
         "delta": list(delta), "r": list(r)}
    fam = family_from_json(d, cx)
    return fam if validate_family(fam).valid else None


def random_tail_free_families(seed: int, count: int, cx: ConeComplex, max_tries: int = 500000):
    """``count`` valid miniversal tail-free families meeting the splitting assumptions."""
    rng = random.Random(seed)
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > max_tries:
            raise TropicalError(f"only {len(out)} families found in {max_tries} draws")
        fam = random_chain_family(rng, cx)
        if fam is None or boundary_class(fam) == "interior":
            continue
        if check_assumptions(fam):
            continue
        if classify_tails(fam) != "tail_free":
            continue
        out.append(fam)
    return out


# -- cones and transversality ------------------------------------------------------------------

MAX_DIM = 4


@dataclass
class ConeMap:
    """Linear map from ``source`` (a cone in Q^d) to Q^t given by an integer t x d matrix."""
    source: Cone
    matrix: tuple

    def __post_init__(self):
        self.matrix = tuple(tuple(int(x) for x in row) for row in self.matrix)
        if self.source.n > MAX_DIM or len(self.matrix) > MAX_DIM:
            raise TropicalError(f"dimension over limit {MAX_DIM}")
        if any(len(row) != self.source.n for row in self.matrix):
            raise TropicalError("matrix shape does not match the source cone")

    @property
    def t(self) -> int:
        return len(self.matrix)


def cone_fibre_product(f1: ConeMap, f2: ConeMap) -> Cone:
    """sigma_1 x_tau sigma_2 inside Q^{d1+d2}."""
    if f1.t != f2.t:
        raise TropicalError("maps have different targets")
    d1, d2 = f1.source.n, f2.source.n
    n = d1 + d2
    ineqs = [tuple(f) + (0,) * d2 for f in f1.source.facets] + [(0,) * d1 + tuple(f) for f in f2.source.facets]
    eqs = [tuple(e) + (0,) * d2 for e in f1.source.equations] + [(0,) * d1 + tuple(e) for e in f2.source.equations]
    eqs += [tuple(r1) + tuple(-x for x in r2) for r1, r2 in zip(f1.matrix, f2.matrix)]
    return Cone.from_inequalities(ineqs, n, eqs)


def face_surjection_check(f1: ConeMap, f2: ConeMap) -> bool:
    """The projection of sigma_1 x_tau sigma_2 to sigma_1 maps each face onto a face."""
    fp = cone_fibre_product(f1, f2)
    d1 = f1.source.n
    proj = [tuple(int(i == j) for j in range(fp.n)) for i in range(d1)]
    for face in fp.faces():
        img = face.image(proj)
        if not f1.source.is_face(img):
            return False
    return True


def transverse_hypothesis(f1: ConeMap, f2: ConeMap) -> bool:
    """f1^{-1}(f2(F)) is a face of sigma_1 for every face F of sigma_2."""
    if f1.t != f2.t:
        raise TropicalError("maps have different targets")
    for face in f2.source.faces():
        img = face.image(f2.matrix)
        pre = img.preimage(f1.matrix, f1.source)
        if not f1.source.is_face(pre):
            return False
    return True


def psi_y_map(lam) -> ConeMap:
    """The quadrant R_lambda^dual -> R>=0 l* + R>=0 delta*, rays to (lam, 1) and (1, 0)."""
    lam = Fraction(lam)
    if lam.denominator != 1:
        # scale the first ray to stay integral
        return ConeMap(Cone([(1, 0), (0, 1)], 2), ((lam.numerator, 1), (lam.denominator, 0)))
    return ConeMap(Cone([(1, 0), (0, 1)], 2), ((int(lam), 1), (1, 0)))


def random_cone_map(rng: random.Random, t: int, max_dim: int = 3, coord: int = 2) -> ConeMap:
    while True:
        d = rng.randint(1, max_dim)
        gens = [tuple(rng.randint(-1, coord) for _ in range(d)) for _ in range(d)]
        if la.rank(gens) != d:
            continue
        mat = tuple(tuple(rng.randint(0, coord) for _ in range(d)) for _ in range(t))
        return ConeMap(Cone(gens, d), mat)


def random_cone_pairs(seed: int, count: int, only_hypothesis: bool = True, max_tries: int = 100000):
    rng = random.Random(seed)
    out, tries = [], 0
    while len(out) < count:
        tries += 1
        if tries > max_tries:
            raise TropicalError("could not generate enough cone pairs")
        t = rng.randint(1, 3)
        f1, f2 = random_cone_map(rng, t), random_cone_map(rng, t)
        if only_hypothesis and not transverse_hypothesis(f1, f2):
            continue
        out.append((f1, f2))
    return out
