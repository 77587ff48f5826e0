"""Generalized cone complexes of snc strata, integral points and skeleta."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product


class ComplexError(ValueError):
    pass


@dataclass(frozen=True)
class Stratum:
    id: str
    labels: tuple
    parents: tuple = ()


@dataclass(frozen=True)
class StrataPoset:
    divisor_labels: tuple
    strata: tuple

    @classmethod
    def from_json(cls, d: dict) -> "StrataPoset":
        labels = tuple(d["divisors"])
        if "strata" not in d:
            raise ComplexError("geometry has no strata")
        strata = []
        for s in d["strata"]:
            strata.append(Stratum(str(s["id"]), tuple(s.get("labels", [])),
                                  tuple(str(p) for p in s.get("parents", []))))
        poset = cls(labels, tuple(strata))
        if d.get("derive_parents"):
            poset = poset.derive_parents()
        return poset

    @classmethod
    def snc(cls, labels, label_sets, ids=None) -> "StrataPoset":
        """Plain snc case: one stratum per label set, relation by inclusion."""
        sets = [tuple(s) for s in label_sets]
        if () not in sets:
            sets = [()] + sets
        ids = ids or ["0" if not s else "".join(s) for s in sets]
        return cls(tuple(labels), tuple(Stratum(i, s) for i, s in zip(ids, sets))).derive_parents()

    def derive_parents(self) -> "StrataPoset":
        by_set = {}
        for s in self.strata:
            key = frozenset(s.labels)
            if key in by_set:
                raise ComplexError(f"label set {sorted(key)} repeated; give explicit parents")
            by_set[key] = s
        out = []
        for s in self.strata:
            ls = frozenset(s.labels)
            parents = tuple(t.id for t in self.strata
                            if ls < frozenset(t.labels) and len(t.labels) == len(s.labels) + 1)
            out.append(Stratum(s.id, s.labels, parents))
        return StrataPoset(self.divisor_labels, tuple(out))


@dataclass(frozen=True, order=True)
class IntegralPoint:
    """Canonical point: strictly positive coordinates on the labels of ``cone``."""
    cone: str
    coords: tuple

    def __repr__(self):
        return f"{self.cone}:{','.join(map(str, self.coords))}" if self.coords else f"{self.cone}:"


class ConeComplex:
    """One unimodular simplicial cone per stratum, glued along coordinate faces."""

    def __init__(self, poset: StrataPoset, allowed=None):
        self.poset = poset
        self.labels = tuple(poset.divisor_labels)
        order = {l: i for i, l in enumerate(self.labels)}
        self._order = order
        strata = [s for s in poset.strata if allowed is None or s.id in allowed]
        self.cone_ids = tuple(s.id for s in strata)
        if len(set(self.cone_ids)) != len(self.cone_ids):
            raise ComplexError("duplicate stratum ids")
        self.cone_labels = {}
        for s in strata:
            for l in s.labels:
                if l not in order:
                    raise ComplexError(f"stratum {s.id} uses unknown label {l}")
            if len(set(s.labels)) != len(s.labels):
                raise ComplexError(f"stratum {s.id} repeats a label")
            self.cone_labels[s.id] = tuple(sorted(s.labels, key=order.__getitem__))
        zeros = [c for c, ls in self.cone_labels.items() if not ls]
        if len(zeros) != 1:
            raise ComplexError("exactly one stratum must have the empty label set")
        self.zero = zeros[0]
        ids = set(self.cone_ids)
        # facet maps: facet[(sigma, label)] = tau
        self.facet = {}
        for s in strata:
            for p in s.parents:
                if p not in ids:
                    if allowed is None:
                        raise ComplexError(f"stratum {s.id} names unknown parent {p}")
                    continue
                pl, sl = set(self.cone_labels[p]), set(self.cone_labels[s.id])
                if not (sl < pl and len(pl) == len(sl) + 1):
                    raise ComplexError(f"{s.id} -> {p}: labels are not a facet inclusion")
                (dropped,) = pl - sl
                key = (p, dropped)
                if key in self.facet and self.facet[key] != s.id:
                    raise ComplexError(f"cone {p} has two facets without label {dropped}")
                self.facet[key] = s.id
        for c in self.cone_ids:
            for l in self.cone_labels[c]:
                if (c, l) not in self.facet:
                    raise ComplexError(f"cone {c} is missing its facet without {l}")
        for c in self.cone_ids:
            ls = self.cone_labels[c]
            for a in ls:
                for b in ls:
                    if a < b and self.facet[(self.facet[(c, a)], b)] != self.facet[(self.facet[(c, b)], a)]:
                        raise ComplexError(f"face maps of {c} do not commute on {a},{b}")

    # -- structure -------------------------------------------------------------
    def dim(self, cone: str) -> int:
        return len(self.cone_labels[cone])

    def face_with_labels(self, cone: str, labels) -> str:
        labels = set(labels)
        cur = cone
        for l in self.cone_labels[cone]:
            if l not in labels:
                cur = self.facet[(cur, l)]
        if set(self.cone_labels[cur]) != labels:
            raise ComplexError(f"{sorted(labels)} is not a face of {cone}")
        return cur

    @cached_property
    def faces(self) -> dict:
        """All faces of each cone (including itself)."""
        out = {}
        for c in sorted(self.cone_ids, key=self.dim):
            fs = {c}
            for l in self.cone_labels[c]:
                fs |= out[self.facet[(c, l)]]
            out[c] = frozenset(fs)
        return out

    def is_face(self, tau: str, sigma: str) -> bool:
        return tau in self.faces[sigma]

    def rays(self) -> list:
        return [c for c in self.cone_ids if self.dim(c) == 1]

    def maximal_cones(self) -> list:
        return [c for c in self.cone_ids if not any(c != d and c in self.faces[d] for d in self.cone_ids)]

    def summary(self) -> dict:
        by_dim = {}
        for c in self.cone_ids:
            by_dim.setdefault(self.dim(c), []).append(c)
        return {"cones": len(self.cone_ids), "by_dim": {k: sorted(v) for k, v in sorted(by_dim.items())}}

    def restrict(self, cone_ids) -> "ConeComplex":
        keep = set(cone_ids)
        for c in keep:
            if not self.faces[c] <= keep:
                raise ComplexError(f"subcomplex not face-closed at {c}")
        return ConeComplex(self.poset, allowed=keep)

    # -- points ------------------------------------------------------------------
    def point(self, cone: str, coords) -> IntegralPoint:
        """Canonicalize a point given by nonnegative coordinates on ``cone``."""
        if cone not in self.cone_labels:
            raise ComplexError(f"unknown cone {cone}")
        ls = self.cone_labels[cone]
        if isinstance(coords, dict):
            extra = set(coords) - set(ls)
            if extra:
                raise ComplexError(f"labels {sorted(extra)} not in cone {cone}")
            coords = [coords.get(l, 0) for l in ls]
        coords = tuple(int(c) for c in coords)
        if len(coords) != len(ls):
            raise ComplexError(f"cone {cone} needs {len(ls)} coordinates")
        if any(c < 0 for c in coords):
            raise ComplexError("coordinates must be nonnegative")
        support = [l for l, c in zip(ls, coords) if c]
        face = self.face_with_labels(cone, support)
        return IntegralPoint(face, tuple(c for c in coords if c))

    def zero_point(self) -> IntegralPoint:
        return IntegralPoint(self.zero, ())

    def check_point(self, p: IntegralPoint) -> IntegralPoint:
        if p.cone not in self.cone_labels:
            raise ComplexError(f"point {p} lies outside the complex")
        if len(p.coords) != self.dim(p.cone) or any(c <= 0 for c in p.coords):
            raise ComplexError(f"point {p} is not canonical")
        return p

    def contains_point(self, p: IntegralPoint) -> bool:
        return p.cone in self.cone_labels

    def pairing(self, p: IntegralPoint, label: str) -> int:
        if label not in self._order:
            raise ComplexError(f"unknown label {label}")
        ls = self.cone_labels[p.cone]
        return p.coords[ls.index(label)] if label in ls else 0

    def pairing_vector(self, p: IntegralPoint) -> tuple:
        return tuple(self.pairing(p, l) for l in self.labels)

    def coords_in(self, p: IntegralPoint, sigma: str) -> tuple:
        """Coordinates of p on the labels of a cone containing it."""
        if not self.is_face(p.cone, sigma):
            raise ComplexError(f"{p} is not in cone {sigma}")
        return tuple(self.pairing(p, l) for l in self.cone_labels[sigma])

    def cones_realizing(self, vector) -> list:
        """Canonical points with the given pairing vector, one per cone."""
        vector = tuple(int(v) for v in vector)
        if any(v < 0 for v in vector):
            return []
        support = {l for l, v in zip(self.labels, vector) if v}
        out = []
        for c in self.cone_ids:
            if set(self.cone_labels[c]) == support:
                out.append(IntegralPoint(c, tuple(vector[self._order[l]] for l in self.cone_labels[c])))
        return out

    def minimal_common_cones(self, *cones) -> list:
        common = [s for s in self.cone_ids if all(c in self.faces[s] for c in cones)]
        return sorted(s for s in common
                      if not any(t != s and t in self.faces[s] for t in common))

    def sums_in_common_cones(self, p: IntegralPoint, q: IntegralPoint) -> list:
        out = []
        for s in self.minimal_common_cones(p.cone, q.cone):
            a, b = self.coords_in(p, s), self.coords_in(q, s)
            out.append((s, self.point(s, [x + y for x, y in zip(a, b)])))
        return out

    def enumerate_points(self, phi, bound: int) -> list:
        """All canonical points with phi(p) <= bound; phi is a dict label -> int."""
        phi = {l: int(phi.get(l, 0)) for l in self.labels} if isinstance(phi, dict) else \
            dict(zip(self.labels, (int(x) for x in phi)))
        for c in self.rays():
            (l,) = self.cone_labels[c]
            if phi[l] <= 0:
                raise ComplexError(f"phi must be positive on ray {c}")
        pts = []
        for c in self.cone_ids:
            ls = self.cone_labels[c]
            ws = [phi[l] for l in ls]

            def rec(i, used, acc):
                if i == len(ls):
                    pts.append(IntegralPoint(c, tuple(acc)))
                    return
                k = 1
                while used + k * ws[i] <= bound:
                    rec(i + 1, used + k * ws[i], acc + [k])
                    k += 1
            rec(0, 0, [])
        value = lambda p: sum(phi[l] * v for l, v in zip(self.cone_labels[p.cone], p.coords))
        return sorted(pts, key=lambda p: (value(p), self.dim(p.cone), p))


def build_complex(poset: StrataPoset) -> ConeComplex:
    return ConeComplex(poset)


# -- skeleton ---------------------------------------------------------------------

@dataclass(frozen=True)
class RelativeData:
    multiplicities: dict
    over_zero: tuple

    def mu(self, label) -> int:
        return int(self.multiplicities.get(label, 1))


@dataclass(frozen=True)
class Skeleton:
    complex: ConeComplex
    ambient: ConeComplex
    coefficients: tuple
    good: frozenset
    relative: RelativeData | None = field(default=None)


def ks_skeleton(cx: ConeComplex, a, relative: RelativeData | None = None) -> Skeleton:
    a = tuple(Fraction(x) for x in a)
    if len(a) != len(cx.labels):
        raise ComplexError("one coefficient per divisor is required")
    if any(x < 0 for x in a):
        raise ComplexError("coefficients a_i must be nonnegative")
    coeff = dict(zip(cx.labels, a))
    if relative is not None and relative.over_zero:
        for l in relative.over_zero:
            if relative.mu(l) < 1:
                raise ComplexError(f"multiplicity of {l} must be >= 1")
        w = min(coeff[l] / relative.mu(l) for l in relative.over_zero)
        for l in relative.over_zero:
            coeff[l] = coeff[l] - w * relative.mu(l)
    good = frozenset(l for l in cx.labels if coeff[l] == 0)
    cones = [c for c in cx.cone_ids if set(cx.cone_labels[c]) <= good]
    return Skeleton(cx.restrict(cones), cx, tuple(coeff[l] for l in cx.labels), good, relative)


def degree(cx: ConeComplex, p: IntegralPoint, relative: RelativeData | None) -> int:
    if relative is None:
        raise ComplexError("degree needs relative data")
    return sum(relative.mu(l) * cx.pairing(p, l) for l in relative.over_zero)
