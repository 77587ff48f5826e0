"""Curve classes, the class monoid P, co-Artinian ideals and S_I = Q[P]/I."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from . import linalg as la
from .monoids import ToricMonoid


class CurveDataError(ValueError):
    pass


FLAGS = ("nef", "anti-nef", "logCY")


@dataclass(frozen=True)
class CurveClassData:
    """H_2 (free part) with D_i . A_j pairings and c_1 pairings."""
    labels: tuple
    h2_rank: int
    pairing_matrix: tuple           # rows indexed by divisors, columns by basis classes
    c1: tuple
    flag: str
    logcy_coeffs: tuple | None = None

    def __post_init__(self):
        m = tuple(tuple(int(x) for x in r) for r in self.pairing_matrix)
        object.__setattr__(self, "pairing_matrix", m)
        object.__setattr__(self, "c1", tuple(int(x) for x in self.c1))
        if len(m) != len(self.labels) or any(len(r) != self.h2_rank for r in m):
            raise CurveDataError("pairing matrix must be (#divisors) x h2_rank")
        if len(self.c1) != self.h2_rank:
            raise CurveDataError("c1 vector must have length h2_rank")
        if self.flag not in FLAGS:
            raise CurveDataError(f"flag must be one of {FLAGS}")
        if self.flag == "logCY":
            if self.logcy_coeffs is None:
                raise CurveDataError("logCY flag needs coefficients a_i")
            a = tuple(Fraction(x) for x in self.logcy_coeffs)
            object.__setattr__(self, "logcy_coeffs", a)
            if len(a) != len(self.labels) or any(x < 0 for x in a):
                raise CurveDataError("logCY coefficients must be nonnegative, one per divisor")
            expect = tuple(-sum(ai * row[j] for ai, row in zip(a, m)) for j in range(self.h2_rank))
            if expect != self.c1:
                raise CurveDataError(f"c1 {list(self.c1)} != -sum a_i D_i = {[str(x) for x in expect]}")

    def divisor_pairing(self, label, cls) -> int:
        return la.dot(self.pairing_matrix[self.labels.index(label)], cls)

    def pairings(self, cls) -> tuple:
        return tuple(la.dot(row, cls) for row in self.pairing_matrix)

    def c1_pairing(self, cls) -> int:
        return la.dot(self.c1, cls)

    def nef_filter(self, cls) -> bool:
        return self.c1_pairing(cls) == 0


class ClassMonoid:
    def __init__(self, generators, phi, rank=None):
        self.monoid = ToricMonoid(generators, rank)
        self.n = self.monoid.n
        self.phi = tuple(int(x) for x in phi)
        if len(self.phi) != self.n:
            raise CurveDataError("phi has the wrong length")
        if not self.monoid.is_sharp:
            raise CurveDataError("class monoid must be sharp")
        for g in self.monoid.generators:
            if la.dot(self.phi, g) <= 0:
                raise CurveDataError(f"phi is not positive on generator {g}")

    def contains(self, a) -> bool:
        return self.monoid.contains(a)

    def value(self, a) -> int:
        return la.dot(self.phi, a)


class CoArtinianIdeal:
    def __init__(self, parent: ClassMonoid, generators=None, threshold=None):
        if (generators is None) == (threshold is None):
            raise CurveDataError("give either ideal generators or a threshold")
        self.parent = parent
        self.generators = None if generators is None else tuple(tuple(int(x) for x in g) for g in generators)
        if threshold is not None:
            phi, k = threshold
            self.threshold = (tuple(int(x) for x in phi), int(k))
            if any(la.dot(self.threshold[0], g) <= 0 for g in parent.monoid.generators):
                raise CurveDataError("threshold functional must be positive on P")
        else:
            self.threshold = None
            for g in self.generators:
                if not parent.contains(g):
                    raise CurveDataError(f"ideal generator {g} not in P")

    def contains(self, a) -> bool:
        if self.threshold is not None:
            return la.dot(self.threshold[0], a) >= self.threshold[1]
        return any(self.parent.contains(la.sub(a, g)) for g in self.generators)

    @cached_property
    def complement(self) -> tuple:
        return complement(self.parent, self)


def complement(p: ClassMonoid, ideal: CoArtinianIdeal, limit: int = 200000) -> tuple:
    """P minus I ordered by (phi, lex); errors if I is not co-Artinian."""
    m = p.monoid
    if ideal.generators is not None:
        # finite iff every extreme ray of P carries a multiple inside I
        for ray in m.cone.rays:
            if not any(la.rank([ray, g]) == 1 and la.dot(ray, g) > 0 for g in ideal.generators):
                raise CurveDataError(f"ideal is not co-Artinian: ray {ray} avoids it")
    gens = m.hilbert_basis if m.is_saturated else m.generators
    z = la.zero(m.n)
    if ideal.contains(z):
        return ()
    seen = {z}
    frontier = [z]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = la.add(x, g)
                if y not in seen and not ideal.contains(y):
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > limit:
                        raise CurveDataError("complement too large; is I co-Artinian?")
        frontier = nxt
    return tuple(sorted(seen, key=lambda a: (p.value(a), a)))


class CoefficientRing:
    """S_I = Q[P]/I with basis P minus I."""

    def __init__(self, p: ClassMonoid, ideal: CoArtinianIdeal):
        self.p = p
        self.ideal = ideal
        self.basis = ideal.complement
        self._index = {a: i for i, a in enumerate(self.basis)}
        self.n = p.n

    def __contains__(self, a) -> bool:
        return tuple(a) in self._index

    def order(self, a) -> int:
        return self._index[tuple(a)]

    def zero(self) -> "Coef":
        return Coef(self, {})

    def one(self) -> "Coef":
        return self.monomial(la.zero(self.n))

    def monomial(self, a, c=1) -> "Coef":
        a = tuple(int(x) for x in a)
        if a not in self._index:
            if not self.p.contains(a):
                raise CurveDataError(f"{a} is not in P")
            return self.zero()
        return Coef(self, {a: Fraction(c)})


class Coef:
    """Element of S_I: finitely supported map (P minus I) -> Q."""
    __slots__ = ("ring", "terms")

    def __init__(self, ring: CoefficientRing, terms):
        self.ring = ring
        self.terms = {tuple(a): Fraction(c) for a, c in terms.items() if c != 0}
        for a in self.terms:
            if a not in ring:
                raise CurveDataError(f"class {a} lies in I or outside P")

    def _check(self, other):
        if not isinstance(other, Coef) or other.ring is not self.ring:
            raise CurveDataError("coefficients from different rings")

    def __add__(self, other):
        self._check(other)
        t = dict(self.terms)
        for a, c in other.terms.items():
            t[a] = t.get(a, 0) + c
        return Coef(self.ring, t)

    def __neg__(self):
        return Coef(self.ring, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return Coef(self.ring, {a: v * Fraction(c) for a, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Coef):
            return self.scale(other)
        self._check(other)
        t = {}
        for a, c in self.terms.items():
            for b, d in other.terms.items():
                s = la.add(a, b)
                if s in self.ring:
                    t[s] = t.get(s, 0) + c * d
        return Coef(self.ring, t)

    __rmul__ = scale

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self == self.ring.one().scale(other)
        return isinstance(other, Coef) and other.ring is self.ring and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: self.ring.order(kv[0]))

    def __repr__(self):
        return format_coef(self) or "0"


def format_fraction(c: Fraction) -> str:
    c = Fraction(c)
    return f"{c.numerator}/{c.denominator}"


def format_class(a) -> str:
    return "t^[" + ",".join(str(x) for x in a) + "]"


def format_coef(c: Coef) -> str:
    return " + ".join(f"{format_fraction(v)} {format_class(a)}" for a, v in c.items())
