"""Structure constants N^A_{p1 p2 r}: computed rules plus user tables."""
from __future__ import annotations

import json
from fractions import Fraction

from . import linalg as la
from .complex import IntegralPoint
from .scenario import Geometry, InputError


class UnknownInvariant(LookupError):
    pass


class TableError(InputError):
    pass


POLICIES = ("strict", "complete")


def _pair(p1, p2):
    return tuple(sorted((p1, p2)))


class InvariantTable:
    """Entries (A, {p1, p2}, r) -> Q with a completeness policy."""

    def __init__(self, entries=None, policy: str = "strict"):
        if policy not in POLICIES:
            raise TableError(f"policy must be one of {POLICIES}")
        self.policy = policy
        self.entries = {}
        for (a, p1, p2, r), n in (entries or {}).items():
            self.add(a, p1, p2, r, n)

    def add(self, a, p1, p2, r, n):
        key = (tuple(a), _pair(p1, p2), r)
        n = Fraction(n)
        if key in self.entries and self.entries[key] != n:
            raise TableError(f"conflicting entries for {key}")
        self.entries[key] = n

    def lookup(self, a, p1, p2, r):
        return self.entries.get((tuple(a), _pair(p1, p2), r))

    def __len__(self):
        return len(self.entries)

    def validate(self, geom: Geometry):
        """Reject entries the computed rules already decide or forbid."""
        for (a, (p1, p2), r), n in self.entries.items():
            where = f"entry A={list(a)} p1={p1} p2={p2} r={r}"
            if not geom.classes.contains(a):
                raise TableError(f"{where}: class not in P")
            if not any(a):
                raise TableError(f"{where}: A=0 values come from constant maps, not tables")
            if p1 == geom.full.zero_point() or p2 == geom.full.zero_point():
                raise TableError(f"{where}: entries with a zero input are fixed by the unit rule")
            if geom.curves.c1_pairing(a) != 0:
                raise TableError(f"{where}: A.c1 != 0 forces the invariant to vanish")
            for p in (p1, p2, r):
                if not geom.full.contains_point(p):
                    raise TableError(f"{where}: point outside the complex")
            if forced_pairings(geom, p1, p2, a) != geom.full.pairing_vector(r):
                raise TableError(f"{where}: violates the intersection-number constraints")
        return self

    @classmethod
    def from_lines(cls, lines, geom: Geometry, policy: str = "strict") -> "InvariantTable":
        t = cls(policy=policy)
        for i, line in enumerate(lines, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                d = json.loads(line)
                a = geom.cls(d["A"])
                p1, p2, r = (geom.full.point(str(d[k]["cone"]), d[k].get("coords", []))
                             if isinstance(d[k], dict) else geom.point(d[k]) for k in ("p1", "p2", "r"))
                t.add(a, p1, p2, r, Fraction(str(d["N"])))
            except (KeyError, ValueError, TypeError) as e:
                raise TableError(f"line {i}: {e}") from e
        return t.validate(geom)

    def to_lines(self) -> list:
        out = []
        for (a, (p1, p2), r), n in sorted(self.entries.items()):
            pt = lambda p: {"cone": p.cone, "coords": list(p.coords)}
            out.append(json.dumps({"A": list(a), "p1": pt(p1), "p2": pt(p2), "r": pt(r),
                                   "N": f"{n.numerator}/{n.denominator}"}, sort_keys=True))
        return out


def forced_pairings(geom: Geometry, p1, p2, a) -> tuple:
    v1, v2 = geom.full.pairing_vector(p1), geom.full.pairing_vector(p2)
    da = geom.curves.pairings(a)
    return tuple(x + y - z for x, y, z in zip(v1, v2, da))


class StructureConstants:
    """get_N with the rule cascade; ``table`` needs a ``lookup`` and a ``policy``."""

    def __init__(self, geom: Geometry, table=None):
        self.geom = geom
        self.table = table if table is not None else InvariantTable(policy="complete")

    @property
    def B(self):
        return self.geom.B

    def constant_term(self, p1, p2, r) -> Fraction:
        for _, s in self.B.sums_in_common_cones(p1, p2):
            if s == r:
                return Fraction(1)
        return Fraction(0)

    def candidate_outputs(self, p1, p2, a) -> list:
        return self.B.cones_realizing(forced_pairings(self.geom, p1, p2, a))

    def get_N_with_provenance(self, a, p1, p2, r):
        a = tuple(a)
        zero = self.B.zero_point()
        if p1 == zero or p2 == zero:
            other = p2 if p1 == zero else p1
            return (Fraction(int(not any(a) and r == other)), "unit")
        if not any(a):
            return (self.constant_term(p1, p2, r), "constant")
        if not self.geom.curves.nef_filter(a):
            return (Fraction(0), "filtered-zero")
        if forced_pairings(self.geom, p1, p2, a) != self.B.pairing_vector(r):
            return (Fraction(0), "filtered-zero")
        v = self.table.lookup(a, p1, p2, r)
        if v is None:
            if self.table.policy == "strict":
                raise UnknownInvariant(f"unknown invariant N^{list(a)}_({p1}, {p2}, {r})")
            return (Fraction(0), "table-missing")
        return (Fraction(v), "table")

    def get_N(self, a, p1, p2, r) -> Fraction:
        return self.get_N_with_provenance(a, p1, p2, r)[0]
