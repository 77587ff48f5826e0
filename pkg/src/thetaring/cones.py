"""Rational polyhedral cones with exact double description.

A cone is stored by its extreme rays (primitive integer vectors) plus a
basis of its lineality space.  Inequality descriptions come from running
double description on the dual.
"""
from __future__ import annotations

from functools import cached_property
from itertools import combinations

from . import linalg as la


def _prim(v):
    return la.primitive(v)


def _extreme(rays, rows, eqs, n, lin_dim):
    keep = []
    for r in rays:
        tight = [a for a in rows if la.dot(a, r) == 0]
        if n - la.rank(list(eqs) + tight) == lin_dim + 1:
            keep.append(r)
    return keep


def double_description(ineqs, n, eqs=()):
    """Generators of {x in Q^n : eqs x = 0, ineqs x >= 0}.

    Returns (lineality basis, extreme rays), both lists of primitive integer
    vectors; rays are sorted for determinism.
    """
    eqs = [tuple(e) for e in eqs if any(e)]
    lin = la.nullspace(eqs, n) if eqs else [tuple(int(i == j) for j in range(n)) for i in range(n)]
    rays: list = []
    done: list = []
    for a in ineqs:
        a = tuple(a)
        if not any(a):
            continue
        k = next((i for i, l in enumerate(lin) if la.dot(a, l) != 0), None)
        if k is not None:
            piv = lin[k]
            if la.dot(a, piv) < 0:
                piv = la.scale(-1, piv)
            ap = la.dot(a, piv)
            lin = [_prim(la.sub(la.scale(ap, l), la.scale(la.dot(a, l), piv)))
                   for i, l in enumerate(lin) if i != k]
            rays = [_prim(la.sub(la.scale(ap, r), la.scale(la.dot(a, r), piv))) for r in rays]
            rays.append(piv)
            done.append(a)
            continue
        pos = [r for r in rays if la.dot(a, r) > 0]
        neg = [r for r in rays if la.dot(a, r) < 0]
        zer = [r for r in rays if la.dot(a, r) == 0]
        new = []
        done.append(a)
        for p in pos:
            ap = la.dot(a, p)
            for q in neg:
                aq = la.dot(a, q)
                new.append(_prim(la.sub(la.scale(ap, q), la.scale(aq, p))))
        cand = list(dict.fromkeys(pos + zer + new))
        cand = [c for c in cand if any(c)]
        rays = _extreme(cand, done, eqs, n, len(lin))
    lin = la.hnf(lin, n) if lin else []
    return lin, sorted(set(rays))


class Cone:
    """Cone generated by rays plus a linear subspace, inside Q^n."""

    def __init__(self, generators=(), n=None, lineality=()):
        gens = [tuple(int(x) for x in g) for g in generators]
        lin = [tuple(int(x) for x in g) for g in lineality]
        if n is None:
            n = len(gens[0]) if gens else len(lin[0])
        self.n = n
        # H-description of the dual, then back again to get extreme rays
        dl, dr = double_description(gens, n, eqs=lin)
        self._dual = (dl, dr)
        self.lineality, self.rays = double_description(dr, n, eqs=dl)
        self.rays = tuple(self.rays)
        self.lineality = tuple(self.lineality)

    @classmethod
    def from_inequalities(cls, ineqs, n, eqs=()):
        lin, rays = double_description(ineqs, n, eqs)
        return cls(rays, n, lin)

    # H-description: x in C iff E x = 0 and F x >= 0
    @property
    def equations(self):
        return self._dual[0]

    @property
    def facets(self):
        return self._dual[1]

    @cached_property
    def dim(self) -> int:
        return la.rank(list(self.rays) + list(self.lineality))

    @property
    def is_pointed(self) -> bool:
        return not self.lineality

    def contains(self, x) -> bool:
        return all(la.dot(e, x) == 0 for e in self.equations) and \
            all(la.dot(f, x) >= 0 for f in self.facets)

    def contains_cone(self, other: "Cone") -> bool:
        return all(self.contains(r) for r in other.rays) and \
            all(self.contains(l) and self.contains(la.scale(-1, l)) for l in other.lineality)

    def __eq__(self, other):
        return isinstance(other, Cone) and self.n == other.n and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def key(self):
        return (self.n, tuple(self.rays), tuple(la.hnf(self.lineality, self.n)))

    def __repr__(self):
        return f"Cone(rays={list(self.rays)}, lineality={list(self.lineality)})"

    def face_from_rays(self, subset) -> "Cone":
        return Cone(list(subset), self.n, self.lineality)

    def faces(self) -> list:
        """All faces, smallest first."""
        ray_sets = {frozenset(self.rays)}
        frontier = [frozenset(r for r in self.rays if la.dot(f, r) == 0) for f in self.facets]
        for s in frontier:
            ray_sets.add(s)
        changed = True
        while changed:
            changed = False
            for a, b in combinations(list(ray_sets), 2):
                c = a & b
                if c not in ray_sets:
                    ray_sets.add(c)
                    changed = True
        # keep only genuine faces: intersections of facet-tight sets (all are)
        faces = [Cone(sorted(s), self.n, self.lineality) for s in ray_sets]
        uniq = {f.key(): f for f in faces}
        return sorted(uniq.values(), key=lambda f: (f.dim, f.key()))

    def minimal_face_containing(self, other: "Cone") -> "Cone":
        pts = list(other.rays) + list(other.lineality) + [la.scale(-1, l) for l in other.lineality]
        tight = [f for f in self.facets if all(la.dot(f, p) == 0 for p in pts)]
        rays = [r for r in self.rays if all(la.dot(f, r) == 0 for f in tight)]
        return Cone(rays, self.n, self.lineality)

    def is_face(self, other: "Cone") -> bool:
        """Whether ``other`` is a face of self."""
        if not self.contains_cone(other):
            return False
        return other.contains_cone(self.minimal_face_containing(other))

    def image(self, m) -> "Cone":
        rows = len(m)
        return Cone([la.matvec(m, r) for r in self.rays], rows,
                    [la.matvec(m, l) for l in self.lineality])

    def preimage(self, m, domain: "Cone | None" = None) -> "Cone":
        """{x : m x in self}, intersected with ``domain`` when given."""
        ncols = len(m[0]) if m else (domain.n if domain else 0)
        mt = la.transpose(m, ncols)
        pull = lambda f: tuple(la.dot(f, col) for col in mt)
        ineqs = [pull(f) for f in self.facets]
        eqs = [pull(e) for e in self.equations]
        if domain is not None:
            ineqs += list(domain.facets)
            eqs += list(domain.equations)
        return Cone.from_inequalities(ineqs, ncols, eqs)

    def dual(self) -> "Cone":
        return Cone(self.facets, self.n, self.equations)


def orthant(n: int) -> Cone:
    return Cone([tuple(int(i == j) for j in range(n)) for i in range(n)], n)
