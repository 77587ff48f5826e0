"""The ring R_I = sum over p in B(Z) of S_I theta_p and its axiom checkers."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement

from . import linalg as la
from .complex import IntegralPoint, degree
from .curves import Coef, format_class, format_fraction
from .invariants import StructureConstants


class ThetaElement:
    """Finitely supported map B(Z) -> S_I."""
    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms=None):
        self.ring = ring                     # CoefficientRing
        self.terms = {}
        for p, c in (terms or {}).items():
            if not c.is_zero():
                self.terms[p] = c

    @classmethod
    def basis(cls, ring, p: IntegralPoint, coef: Coef | None = None) -> "ThetaElement":
        return cls(ring, {p: coef if coef is not None else ring.one()})

    def __add__(self, other):
        t = dict(self.terms)
        for p, c in other.terms.items():
            t[p] = t[p] + c if p in t else c
        return ThetaElement(self.ring, t)

    def __neg__(self):
        return ThetaElement(self.ring, {p: -c for p, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "ThetaElement":
        if not isinstance(c, Coef):
            c = self.ring.one().scale(c)
        return ThetaElement(self.ring, {p: v * c for p, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, ThetaElement) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, a, p) -> Fraction:
        c = self.terms.get(p)
        return c.terms.get(tuple(a), Fraction(0)) if c else Fraction(0)

    def items(self):
        """(class, point, value) triples in canonical order."""
        out = []
        for p in sorted(self.terms):
            for a, v in self.terms[p].items():
                out.append((a, p, v))
        return out

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{format_fraction(v)} {format_class(a)} theta{{{p!r}}}"
                          for a, p, v in self.items())

    def to_json(self):
        return [{"A": list(a), "point": {"cone": p.cone, "coords": list(p.coords)},
                 "N": format_fraction(v)} for a, p, v in self.items()]

    __repr__ = to_text


@dataclass
class Contribution:
    a: tuple
    r: IntegralPoint
    n: Fraction
    provenance: str


@dataclass
class ProductReport:
    p1: IntegralPoint
    p2: IntegralPoint
    contributions: list
    result: ThetaElement

    def nonzero(self):
        return [c for c in self.contributions if c.n != 0]

    def to_json(self):
        return {"p1": repr(self.p1), "p2": repr(self.p2),
                "contributions": [{"A": list(c.a), "r": repr(c.r), "N": format_fraction(c.n),
                                   "provenance": c.provenance} for c in self.contributions],
                "result": self.result.to_text()}


@dataclass
class CheckReport:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, msg):
        self.failures.append(msg)

    def to_json(self):
        return {"check": self.name, "passed": self.passed, "checked": self.checked,
                "failures": self.failures[:20]}

    def to_text(self):
        head = f"{self.name}: {'PASS' if self.passed else 'FAIL'} ({self.checked} checked)"
        return "\n".join([head] + [f"  {f}" for f in self.failures[:20]])


class ThetaRing:
    def __init__(self, geom, table=None):
        self.geom = geom
        self.sc = StructureConstants(geom, table)
        self.S = geom.ring
        self._cache = {}

    @property
    def B(self):
        return self.geom.B

    def theta(self, p, coef=None) -> ThetaElement:
        p = self.geom.point(p)
        return ThetaElement.basis(self.S, p, coef)

    def one(self) -> ThetaElement:
        return self.theta(self.B.zero_point())

    def zero(self) -> ThetaElement:
        return ThetaElement(self.S)

    def multiply(self, p1, p2) -> ProductReport:
        p1, p2 = self.geom.point(p1), self.geom.point(p2)
        key = (p1, p2)
        if key in self._cache:
            return self._cache[key]
        contribs = []
        terms = {}
        for a in self.S.basis:
            for r in self.sc.candidate_outputs(p1, p2, a):
                n, prov = self.sc.get_N_with_provenance(a, p1, p2, r)
                contribs.append(Contribution(a, r, n, prov))
                if n:
                    c = self.S.monomial(a, n)
                    terms[r] = terms[r] + c if r in terms else c
        rep = ProductReport(p1, p2, contribs, ThetaElement(self.S, terms))
        self._cache[key] = rep
        return rep

    def product(self, p1, p2) -> ThetaElement:
        return self.multiply(p1, p2).result

    def multiply_elements(self, x: ThetaElement, y: ThetaElement) -> ThetaElement:
        out = self.zero()
        for p, c in x.terms.items():
            for q, d in y.terms.items():
                out = out + self.product(p, q).scale(c * d)
        return out

    def monomial(self, points) -> ThetaElement:
        out = self.one()
        for p in points:
            out = self.multiply_elements(out, self.theta(p))
        return out

    # -- checkers ---------------------------------------------------------------
    def check_unit(self, points) -> CheckReport:
        rep = CheckReport("unit")
        one = self.B.zero_point()
        for p in points:
            p = self.geom.point(p)
            rep.checked += 1
            for lhs in (self.product(one, p), self.product(p, one)):
                if lhs != self.theta(p):
                    rep.fail(f"theta_0 * theta_{p!r} = {lhs.to_text()}")
        return rep

    def check_commutativity(self, points) -> CheckReport:
        rep = CheckReport("commutativity")
        pts = [self.geom.point(p) for p in points]
        for p, q in combinations_with_replacement(pts, 2):
            rep.checked += 1
            a, b = self.product(p, q), self.product(q, p)
            if a != b:
                rep.fail(f"theta_{p!r} theta_{q!r}: {a.to_text()} != {b.to_text()}")
        return rep

    def _assoc_side(self, x, y, z, order):
        """Sum over A1 + A2 = A, s of N^{A1} N^{A2} as in the associativity identity."""
        sc, S = self.sc, self.S
        out = {}
        for a1 in S.basis:
            for s in sc.candidate_outputs(x, y, a1):
                n1 = sc.get_N(a1, x, y, s)
                if not n1:
                    continue
                for a2 in S.basis:
                    a = la.add(a1, a2)
                    if a not in S:
                        continue
                    for r in sc.candidate_outputs(s, z, a2) if order == "left" else \
                            sc.candidate_outputs(z, s, a2):
                        n2 = sc.get_N(a2, s, z, r) if order == "left" else sc.get_N(a2, z, s, r)
                        if n2:
                            out[(a, r)] = out.get((a, r), 0) + n1 * n2
        return {k: v for k, v in out.items() if v}

    def check_associativity(self, p1, p2, p3, rep: CheckReport | None = None) -> CheckReport:
        rep = rep or CheckReport("associativity")
        p1, p2, p3 = (self.geom.point(p) for p in (p1, p2, p3))
        rep.checked += 1
        left = self._assoc_side(p1, p2, p3, "left")        # N_{p1p2s} N_{s p3 r}
        right = self._assoc_side(p2, p3, p1, "right")      # N_{p2p3s} N_{p1 s r}
        if left != right:
            diff = sorted(set(left) ^ set(right) | {k for k in left if k in right and left[k] != right[k]})
            rep.fail(f"({p1!r},{p2!r},{p3!r}): identity fails at {[(list(a), repr(r)) for a, r in diff[:4]]}")
            return rep
        e1 = self.multiply_elements(self.multiply_elements(self.theta(p1), self.theta(p2)), self.theta(p3))
        e2 = self.multiply_elements(self.theta(p1), self.multiply_elements(self.theta(p2), self.theta(p3)))
        if e1 != e2:
            rep.fail(f"({p1!r},{p2!r},{p3!r}): {e1.to_text()} != {e2.to_text()}")
        sums = ThetaElement(self.S, {})
        for (a, r), v in left.items():
            sums = sums + ThetaElement.basis(self.S, r, self.S.monomial(a, v))
        if sums != e1:
            rep.fail(f"({p1!r},{p2!r},{p3!r}): identity sums disagree with iterated products")
        return rep

    def products(self, points) -> list:
        pts = [self.geom.point(p) for p in points]
        return [self.multiply(p, q) for p, q in combinations_with_replacement(pts, 2)]

    def check_torus_grading(self, reports) -> CheckReport:
        rep = CheckReport("torus-grading")
        for pr in reports:
            vp, vq = self.B.pairing_vector(pr.p1), self.B.pairing_vector(pr.p2)
            for c in pr.nonzero():
                rep.checked += 1
                vr = self.B.pairing_vector(c.r)
                da = self.geom.curves.pairings(c.a)
                if tuple(r + d for r, d in zip(vr, da)) != la.add(vp, vq):
                    rep.fail(f"{pr.p1!r}*{pr.p2!r}: term t^{list(c.a)} theta_{c.r!r} breaks the grading")
        return rep

    def check_degree_grading(self, reports) -> CheckReport:
        rep = CheckReport("degree-grading")
        rel = self.geom.relative
        if rel is None:
            return rep
        deg = lambda p: degree(self.B, p, rel)
        for pr in reports:
            for c in pr.nonzero():
                rep.checked += 1
                if deg(c.r) != deg(pr.p1) + deg(pr.p2):
                    rep.fail(f"{pr.p1!r}*{pr.p2!r}: deg {c.r!r} = {deg(c.r)} "
                             f"!= {deg(pr.p1)} + {deg(pr.p2)}")
        return rep

    def rees(self, s: dict, reports, bound: int):
        """Filtration check for <p1,s> + <p2,s> >= <r,s>; returns (report, generators)."""
        rep = CheckReport("rees-filtration")
        s = {l: Fraction(str(s.get(l, 0))) for l in self.geom.labels}
        if any(v < 0 for v in s.values()):
            raise ValueError("Rees functional needs nonnegative divisor coefficients")
        val = lambda p: sum(s[l] * self.B.pairing(p, l) for l in self.geom.labels)
        for pr in reports:
            for c in pr.nonzero():
                rep.checked += 1
                if val(pr.p1) + val(pr.p2) < val(c.r):
                    rep.fail(f"{pr.p1!r}*{pr.p2!r}: term t^{list(c.a)} theta_{c.r!r} has "
                             f"<r,s>={val(c.r)} > {val(pr.p1) + val(pr.p2)}")
        gens = []
        for p in self.geom.points_up_to(bound):
            v = val(p)
            d0 = -(-v.numerator // v.denominator)
            for d in range(d0, bound + 1):
                gens.append((d, p))
        return rep, sorted(gens, key=lambda x: (x[0], x[1]))
