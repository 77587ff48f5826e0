"""Polynomial presentations of R_I: a multiset rewriting evaluator, tables derived
from it, and a relation finder working from a ThetaRing."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement

from . import linalg as la
from .complex import IntegralPoint
from .curves import Coef, format_coef
from .scenario import InputError
from .theta import ThetaElement


class PresentationError(ValueError):
    pass


class NonConfluent(PresentationError):
    pass


def _word(points) -> tuple:
    return tuple(sorted(points))


def _sub_multiset(word, part):
    rest = list(word)
    for p in part:
        if p not in rest:
            return None
        rest.remove(p)
    return tuple(rest)


@dataclass(frozen=True)
class Relation:
    """lhs -> sum coef * word; words are sorted tuples of points."""
    lhs: tuple
    rhs: tuple                      # ((Coef, word), ...)

    def normal_form(self, ring) -> dict:
        """lhs - rhs as {word: {class: value}}, for structural comparison."""
        out = {}
        for coef, word, sign in [(ring.one(), self.lhs, 1)] + [(c, w, -1) for c, w in self.rhs]:
            d = out.setdefault(word, {})
            for a, v in coef.terms.items():
                d[a] = d.get(a, 0) + sign * v
                if d[a] == 0:
                    del d[a]
            if not d:
                del out[word]
        return out


@dataclass(frozen=True)
class MonomialCone:
    cone: str
    generators: tuple               # points lying in faces of ``cone``


class RingPresentation:
    """Variables, ordered rewriting relations and cones where products are monomial."""

    def __init__(self, geom, variables: dict, relations, monomial_cones=None, monomial_rule=True):
        self.geom = geom
        self.B = geom.B
        self.S = geom.ring
        self.variables = dict(variables)
        self.names = {p: n for n, p in self.variables.items()}
        self.relations = list(relations)
        self.monomial_rule = monomial_rule
        if monomial_cones is None:
            monomial_cones = [MonomialCone(c, tuple(self.B.point(c, [1 if l == m else 0 for m in self.B.cone_labels[c]])
                                                    for l in self.B.cone_labels[c]))
                              for c in self.B.maximal_cones()]
        self.monomial_cones = list(monomial_cones)
        for mc in self.monomial_cones:
            if mc.cone not in self.B.cone_labels:
                raise PresentationError(f"monomial cone in unknown cone {mc.cone}")
            for g in mc.generators:
                if not self.B.is_face(g.cone, mc.cone):
                    raise PresentationError(f"generator {g!r} not in cone {mc.cone}")
            mat = [self.B.coords_in(g, mc.cone) for g in mc.generators]
            if la.rank(mat) != len(mat):
                raise PresentationError(f"monomial cone generators in {mc.cone} are dependent")
        for r in self.relations:
            if not r.lhs:
                raise PresentationError("relation with empty left side")
        self._memo = {}

    # -- monomial rule -------------------------------------------------------------
    def _decompose(self, mc: MonomialCone, p: IntegralPoint):
        if not self.B.is_face(p.cone, mc.cone):
            return None
        cols = [self.B.coords_in(g, mc.cone) for g in mc.generators]
        x = la.solve(la.transpose(cols), self.B.coords_in(p, mc.cone))
        if x is None or any(v < 0 or v.denominator != 1 for v in x):
            return None
        return tuple(int(v) for v in x)

    def monomial_value(self, word):
        """theta of the in-cone sum if every point of ``word`` sits in one monomial cone."""
        sums = set()
        for mc in self.monomial_cones:
            if all(self._decompose(mc, p) is not None for p in word):
                tot = [0] * self.B.dim(mc.cone)
                for p in word:
                    tot = [a + b for a, b in zip(tot, self.B.coords_in(p, mc.cone))]
                sums.add(self.B.point(mc.cone, tot))
        if len(sums) > 1:
            raise PresentationError(f"monomial cones disagree on {self.word_text(word)}")
        return next(iter(sums)) if sums else None

    def theta_word(self, p) -> tuple:
        """Write theta_p as a monomial in the generators of a monomial cone containing p."""
        p = self.geom.point(p)
        if p == self.B.zero_point():
            return ()
        if p in self.names:
            return (p,)
        for mc in self.monomial_cones:
            x = self._decompose(mc, p)
            if x is not None:
                w = []
                for g, n in zip(mc.generators, x):
                    w += [g] * n
                return _word(w)
        raise PresentationError(f"point {p!r} lies in no monomial cone")

    # -- evaluation -----------------------------------------------------------------
    def _apply(self, rel: Relation, rest) -> ThetaElement:
        out = ThetaElement(self.S)
        for c, w in rel.rhs:
            out = out + self.eval(_word(rest + w)).scale(c)
        return out

    def eval(self, word) -> ThetaElement:
        word = _word(word)
        if word in self._memo:
            if self._memo[word] is None:
                raise PresentationError(f"rewriting loops on {self.word_text(word)}")
            return self._memo[word]
        if len(self._memo) > 200000:
            raise PresentationError("rewriting does not terminate")
        self._memo[word] = None          # recursion guard
        try:
            res = self._eval(word)
        except BaseException:
            del self._memo[word]
            raise
        self._memo[word] = res
        return res

    def _eval(self, word):
        if not word:
            return ThetaElement.basis(self.S, self.B.zero_point())
        for rel in self.relations:
            rest = _sub_multiset(word, rel.lhs)
            if rest is not None:
                return self._apply(rel, rest)
        if len(word) == 1:
            return ThetaElement.basis(self.S, word[0])
        if self.monomial_rule:
            s = self.monomial_value(word)
            if s is not None:
                return ThetaElement.basis(self.S, s)
        raise PresentationError(f"no rule reduces {self.word_text(word)}")

    def eval_checked(self, word) -> ThetaElement:
        v = self.eval(word)
        if v is None:
            raise PresentationError(f"rewriting loops on {self.word_text(word)}")
        return v

    def alternatives(self, word) -> list:
        """(rule name, value) for every rule that applies as a first step."""
        word = _word(word)
        out = []
        for i, rel in enumerate(self.relations):
            rest = _sub_multiset(word, rel.lhs)
            if rest is not None:
                out.append((f"relation {i + 1}: {self.relation_text(rel)}", self._apply(rel, rest)))
        if self.monomial_rule and len(word) > 1:
            s = self.monomial_value(word)
            if s is not None:
                out.append(("monomial rule", ThetaElement.basis(self.S, s)))
        return out

    def check_confluence(self, bound: int) -> int:
        """Compare every first rewriting step on variable words up to ``bound``."""
        pts = sorted(self.variables.values())
        n = 0
        for d in range(2, bound + 1):
            for word in combinations_with_replacement(pts, d):
                alts = self.alternatives(word)
                n += 1
                for name, val in alts[1:]:
                    if val != alts[0][1]:
                        raise NonConfluent(
                            f"critical pair on {self.word_text(word)}: {alts[0][0]} gives "
                            f"{val_text(alts[0][1])} but {name} gives {val_text(val)}")
        return n

    # -- text -------------------------------------------------------------------------
    def point_text(self, p) -> str:
        return f"theta[{self.names[p]}]" if p in self.names else f"theta{{{p!r}}}"

    def word_text(self, word) -> str:
        return "*".join(self.point_text(p) for p in word) if word else "1"

    def relation_text(self, rel: Relation) -> str:
        rhs = " + ".join(f"({format_coef(c)}) {self.word_text(w)}" for c, w in rel.rhs) or "0"
        return f"{self.word_text(rel.lhs)} = {rhs}"

    def to_text(self) -> str:
        lines = [f"variables: " + ", ".join(f"{n}={p!r}" for n, p in sorted(self.variables.items()))]
        lines += [self.relation_text(r) for r in self.relations]
        return "\n".join(lines)

    def to_json(self):
        pt = lambda p: self.names.get(p, repr(p))
        return {"variables": {n: repr(p) for n, p in sorted(self.variables.items())},
                "relations": [{"lhs": [pt(p) for p in r.lhs],
                               "rhs": [{"coef": [{"A": list(a), "N": f"{v.numerator}/{v.denominator}"}
                                                 for a, v in c.items()],
                                        "word": [pt(p) for p in w]} for c, w in r.rhs]}
                              for r in self.relations],
                "monomial_cones": [{"cone": m.cone, "generators": [pt(g) for g in m.generators]}
                                   for m in self.monomial_cones]}


def val_text(v) -> str:
    return "<loop>" if v is None else v.to_text()


def presentation_eval(pres: RingPresentation, word) -> ThetaElement:
    return pres.eval_checked([pres.geom.point(p) if not isinstance(p, IntegralPoint) else p for p in word])


def presentation_from_json(geom, d: dict) -> RingPresentation:
    try:
        variables = {n: geom.point(s) for n, s in d["variables"].items()}
        resolve = lambda s: variables[s] if s in variables else geom.point(s)

        def coef(terms):
            c = geom.ring.zero()
            for t in terms:
                c = c + geom.ring.monomial(geom.cls(t["A"]), Fraction(str(t.get("N", 1))))
            return c
        rels = [Relation(_word(resolve(s) for s in r["lhs"]),
                         tuple((coef(t["coef"]), _word(resolve(s) for s in t["word"])) for t in r["rhs"]))
                for r in d.get("relations", [])]
        cones = None
        if d.get("monomial_cones") is not None:
            cones = [MonomialCone(str(m["cone"]), tuple(resolve(g) for g in m["generators"]))
                     for m in d["monomial_cones"]]
        return RingPresentation(geom, variables, rels, cones, d.get("monomial_rule", True))
    except (KeyError, TypeError) as e:
        raise InputError(f"bad presentation: {e}") from e


class PresentationTable:
    """Structure constants read off a presentation: N^A_{p1p2r} is the coefficient of
    t^A theta_r in the normal form of word(p1)*word(p2)."""

    policy = "strict"

    def __init__(self, pres: RingPresentation):
        self.pres = pres
        self._prod = {}

    def product(self, p1, p2) -> ThetaElement:
        key = tuple(sorted((p1, p2)))
        if key not in self._prod:
            w1, w2 = self.pres.theta_word(p1), self.pres.theta_word(p2)
            for p, w in ((p1, w1), (p2, w2)):
                if self.pres.eval_checked(w) != ThetaElement.basis(self.pres.S, p):
                    raise PresentationError(f"theta word of {p!r} does not evaluate to theta_{p!r}")
            self._prod[key] = self.pres.eval_checked(w1 + w2)
        return self._prod[key]

    def lookup(self, a, p1, p2, r):
        return self.product(p1, p2).coefficient(a, r)

    def constant_mismatches(self, sc, points) -> list:
        """Pairs whose A=0 part differs from the constant-map rule."""
        bad = []
        zero = tuple(0 for _ in range(self.pres.S.n))
        for p, q in combinations_with_replacement(points, 2):
            prod = self.product(p, q)
            got = {r: prod.coefficient(zero, r) for r in prod.terms if prod.coefficient(zero, r)}
            want = {}
            for _, s in sc.B.sums_in_common_cones(p, q):
                want[s] = want.get(s, 0) + 1
            if got != want:
                bad.append((p, q))
        return bad


# -- relation finder -------------------------------------------------------------------

@dataclass
class FoundPresentation:
    presentation: RingPresentation
    defining: list = field(default_factory=list)
    identifications: list = field(default_factory=list)


def find_presentation(ring, generators, bound: int, names=None) -> FoundPresentation:
    """Relations among monomials in ``generators`` up to degree ``bound``.

    A monomial is standard when its support spans a single minimal cone of B; its
    product then has leading term the in-cone sum.  Minimal non-standard monomials
    give the defining relations, expressed in standard monomials by triangular
    elimination over S_I."""
    geom, B, S = ring.geom, ring.B, ring.S
    gens = [geom.point(g) for g in generators]
    if len(set(gens)) != len(gens) or B.zero_point() in gens:
        raise PresentationError("generators must be distinct nonzero points")
    names = list(names) if names else [geom.point_name(g) for g in gens]
    names = [n if n not in ("",) else repr(g) for n, g in zip(names, gens)]
    variables = dict(zip(names, gens))

    def support(e):
        return [g for g, k in zip(gens, e) if k]

    def standard_cone(e):
        sup = support(e)
        if not sup:
            return B.zero
        mc = B.minimal_common_cones(*(g.cone for g in sup))
        return mc[0] if len(mc) == 1 else None

    def word(e):
        w = []
        for g, k in zip(gens, e):
            w += [g] * k
        return _word(w)

    values = {}

    def value(e):
        if e not in values:
            values[e] = ring.monomial(word(e))
        return values[e]

    std_for = {}

    def standard_for(r: IntegralPoint):
        if r in std_for:
            return std_for[r]
        best = None
        for sigma in B.cone_ids:
            if not B.is_face(r.cone, sigma):
                continue
            target = B.coords_in(r, sigma)
            usable = [i for i, g in enumerate(gens) if B.is_face(g.cone, sigma)]
            vecs = {i: B.coords_in(gens[i], sigma) for i in usable}

            def rec(k, rem, e):
                nonlocal best
                if k == len(usable):
                    if not any(rem):
                        e = tuple(e)
                        sc = standard_cone(e)
                        if sc is not None and standard_lead(B, gens, e, sc) == r:
                            key = (sum(e), e)
                            if best is None or key < (sum(best), best):
                                best = e
                    return
                i = usable[k]
                n = 0
                cur = rem
                while all(x >= 0 for x in cur):
                    e2 = list(e)
                    e2[i] = n
                    rec(k + 1, cur, e2)
                    if not any(vecs[i]):
                        break
                    n += 1
                    cur = la.sub(cur, vecs[i])
            rec(0, target, [0] * len(gens))
        std_for[r] = best
        return best

    def express(val: ThetaElement) -> dict:
        """{exponent: Coef} with sum coef * value(exponent) == val."""
        poly = {}
        residual = val
        for _ in range(10000):
            if residual.is_zero():
                return poly
            a, r, c = min(residual.items(), key=lambda t: (S.order(t[0]), t[1]))
            e = standard_for(r)
            if e is None:
                raise PresentationError(f"theta_{r!r} is not a standard monomial in the generators")
            coef = S.monomial(a, c)
            poly[e] = poly[e] + coef if e in poly else coef
            residual = residual - value(e).scale(coef)
        raise PresentationError("elimination did not terminate")

    exps = [e for d in range(2, bound + 1) for e in _exponents(len(gens), d)]
    nonstd = [e for e in exps if standard_cone(e) is None]
    minimal = [e for e in nonstd
               if not any(f != e and all(x <= y for x, y in zip(f, e)) for f in nonstd)]
    defining = []
    used_std = set()
    for e in sorted(minimal, key=lambda e: (sum(e), tuple(-x for x in e))):
        poly = express(value(e))
        rhs = tuple((c, word(f)) for f, c in sorted(poly.items(), key=lambda kv: (sum(kv[0]), tuple(-x for x in kv[0]))))
        used_std |= set(poly)
        defining.append(Relation(word(e), rhs))
    idents = []
    std = sorted({e for e in exps if standard_cone(e) is not None} | {e for e in used_std if sum(e) > 1},
                 key=lambda e: (-sum(e), tuple(-x for x in e)))
    for e in std:
        v = value(e)
        lead = standard_lead(B, gens, e, standard_cone(e))
        if v != ThetaElement.basis(S, lead):
            idents.append(Relation(word(e), tuple((c, (p,)) for p, c in sorted(v.terms.items()))))
    pres = RingPresentation(geom, variables, defining + idents)
    return FoundPresentation(pres, defining, idents)


def standard_lead(B, gens, e, sigma) -> IntegralPoint:
    tot = [0] * B.dim(sigma)
    for g, k in zip(gens, e):
        if k:
            tot = [a + k * b for a, b in zip(tot, B.coords_in(g, sigma))]
    return B.point(sigma, tot)


def _exponents(n, d):
    if n == 0:
        if d == 0:
            yield ()
        return
    for k in range(d, -1, -1):
        for rest in _exponents(n - 1, d - k):
            yield (k,) + rest
