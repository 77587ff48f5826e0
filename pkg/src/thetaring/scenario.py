"""A geometry: cone complex, skeleton and curve data cross-validated together."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .complex import (ComplexError, ConeComplex, IntegralPoint, RelativeData, Skeleton,
                      StrataPoset, build_complex, ks_skeleton)
from .curves import (ClassMonoid, CoArtinianIdeal, CoefficientRing, CurveClassData,
                     CurveDataError)


class InputError(ValueError):
    """Malformed or inconsistent input data."""


@dataclass
class Geometry:
    name: str
    full: ConeComplex
    skeleton: Skeleton
    curves: CurveClassData
    classes: ClassMonoid
    ideal: CoArtinianIdeal
    ring: CoefficientRing
    relative: RelativeData | None = None
    named_points: dict = field(default_factory=dict)
    point_phi: dict = field(default_factory=dict)
    rees_s: dict = field(default_factory=dict)
    class_names: dict = field(default_factory=dict)

    @property
    def B(self) -> ConeComplex:
        return self.skeleton.complex

    @property
    def labels(self) -> tuple:
        return self.full.labels

    def point(self, spec) -> IntegralPoint:
        """Parse a point: a name, "0", or "cone:c1,c2,..."."""
        if isinstance(spec, IntegralPoint):
            return self.B.check_point(spec)
        if isinstance(spec, dict):
            return self.B.check_point(self.full.point(str(spec["cone"]), spec.get("coords", [])))
        spec = str(spec).strip()
        if spec in self.named_points:
            return self.named_points[spec]
        if spec == "0":
            return self.B.zero_point()
        if ":" in spec:
            cone, coords = spec.split(":", 1)
            vals = [int(x) for x in coords.split(",") if x.strip()]
            p = self.full.point(cone, vals)
            if not self.B.contains_point(p):
                raise InputError(f"point {spec} is not in the skeleton")
            return p
        raise InputError(f"cannot parse point {spec!r}")

    def point_name(self, p: IntegralPoint) -> str:
        return repr(p)

    def cls(self, spec) -> tuple:
        if isinstance(spec, str):
            if spec in self.class_names:
                return self.class_names[spec]
            return tuple(int(x) for x in spec.strip("[]").split(","))
        return tuple(int(x) for x in spec)

    def points_up_to(self, bound: int) -> list:
        phi = self.point_phi or {l: 1 for l in self.labels}
        return self.B.enumerate_points(phi, bound)


def _parse_coeffs(values):
    return tuple(Fraction(str(v)) for v in values)


def geometry_from_json(d: dict) -> Geometry:
    try:
        poset = StrataPoset.from_json(d)
        full = build_complex(poset)
        labels = full.labels
        rel = None
        if d.get("relative"):
            r = d["relative"]
            rel = RelativeData(dict(r.get("multiplicities", {})), tuple(r.get("over_zero", [])))
            for l in rel.over_zero:
                if l not in labels:
                    raise InputError(f"over_zero label {l} unknown")
        a = _parse_coeffs(d.get("skeleton_coeffs", [0] * len(labels)))
        skel = ks_skeleton(full, a, rel)
        cd = d["curves"]
        if len(cd["pairing_matrix"]) != len(labels):
            raise InputError("pairing matrix rows must match the divisor count")
        curves = CurveClassData(labels, int(cd["h2_rank"]), cd["pairing_matrix"], cd["c1"],
                                cd.get("flag", "nef"),
                                _parse_coeffs(cd["logcy_coeffs"]) if cd.get("logcy_coeffs") is not None else None)
        cm = cd["class_monoid"]
        classes = ClassMonoid([tuple(g) for g in cm["generators"]], cm["phi"], curves.h2_rank)
        idl = cd["ideal"]
        if "generators" in idl:
            ideal = CoArtinianIdeal(classes, generators=[tuple(g) for g in idl["generators"]])
        else:
            ideal = CoArtinianIdeal(classes, threshold=(idl["phi"], idl["k"]))
        ring = CoefficientRing(classes, ideal)
        geom = Geometry(d.get("name", "geometry"), full, skel, curves, classes, ideal, ring, rel,
                        point_phi=dict(d.get("point_phi", {})), rees_s=dict(d.get("rees_s", {})))
        geom.class_names = {k: tuple(v) for k, v in d.get("class_names", {}).items()}
        for name, spec in d.get("points", {}).items():
            geom.named_points[name] = full.point(str(spec["cone"]), spec.get("coords", []))
        return geom
    except (ComplexError, CurveDataError, KeyError, TypeError) as e:
        raise InputError(f"bad geometry: {e}") from e
