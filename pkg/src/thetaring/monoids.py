"""Toric monoids, ideals, homomorphisms and the fs-pushout toolkit."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations, product

from . import linalg as la
from .cones import Cone

INFINITE = "infinite"


class MonoidError(ValueError):
    pass


class LambdaTooSmall(MonoidError):
    pass


def _canon(gens, n):
    out = []
    for g in gens:
        g = tuple(int(x) for x in g)
        if len(g) != n:
            raise MonoidError(f"generator {g} has wrong length, expected {n}")
        if any(g):
            out.append(g)
    return tuple(sorted(set(out)))


class ToricMonoid:
    """Finitely generated submonoid of Z^n given by generators."""

    def __init__(self, generators, rank: int | None = None):
        generators = list(generators)
        if rank is None:
            if not generators:
                raise MonoidError("rank required for the trivial monoid")
            rank = len(generators[0])
        self.n = rank
        self.generators = _canon(generators, rank)

    def __repr__(self):
        return f"ToricMonoid({[list(g) for g in self.generators]}, rank={self.n})"

    # -- lattice data --------------------------------------------------------
    @cached_property
    def group_basis(self) -> list:
        return la.hnf(self.generators, self.n)

    @property
    def group_rank(self) -> int:
        return len(self.group_basis)

    def group_coords(self, x):
        return la.lattice_coords(x, self.group_basis)

    def from_group_coords(self, c):
        out = la.zero(self.n)
        for ci, b in zip(c, self.group_basis):
            out = la.add(out, la.scale(ci, b))
        return out

    @cached_property
    def cone(self) -> Cone:
        return Cone(self.generators, self.n)

    @cached_property
    def is_sharp(self) -> bool:
        return self.cone.is_pointed

    @cached_property
    def positive_functional(self):
        """Integer functional strictly positive on the monoid minus 0 (sharp case)."""
        if not self.is_sharp:
            raise MonoidError("monoid is not sharp")
        f = la.zero(self.n)
        for r in self.cone.facets:
            f = la.add(f, r)
        return f

    def in_group(self, x) -> bool:
        return self.group_coords(x) is not None

    def in_saturation(self, x) -> bool:
        return self.in_group(x) and self.cone.contains(x)

    def contains(self, x) -> bool:
        x = tuple(int(v) for v in x)
        if not self.in_saturation(x):
            return False
        if not any(x):
            return True
        if self.is_saturated:
            return True
        return self._reachable(x)

    def _reachable(self, x) -> bool:
        if not self.is_sharp:
            raise MonoidError("membership in non-sharp non-saturated monoids is unsupported")
        phi = self.positive_functional
        gens = self.generators
        cone = self.cone

        @lru_cache(maxsize=None)
        def rec(y):
            if not any(y):
                return True
            py = la.dot(phi, y)
            for g in gens:
                if la.dot(phi, g) <= py:
                    z = la.sub(y, g)
                    if cone.contains(z) and rec(z):
                        return True
            return False

        return rec(x)

    # -- saturation ----------------------------------------------------------
    @cached_property
    def hilbert_basis(self) -> tuple:
        """Generators of the saturation; minimal when the monoid is sharp."""
        return tuple(sorted(_saturation_generators(self)))

    @cached_property
    def is_saturated(self) -> bool:
        gens = set(self.generators)
        for h in self.hilbert_basis:
            if h in gens:
                continue
            if not self._reachable_unsat(h):
                return False
        return True

    def _reachable_unsat(self, x) -> bool:
        if not self.is_sharp:
            # every saturation generator must be a Z-combination staying in M;
            # fall back to a bounded search over the sharp quotient
            raise MonoidError("saturation test for non-sharp monoids is unsupported")
        return self._reachable(x)

    @cached_property
    def minimal_generators(self) -> tuple:
        """Irreducible elements (sharp monoids)."""
        if not self.is_sharp:
            return self.generators
        phi = self.positive_functional
        gens = sorted(self.generators, key=lambda g: (la.dot(phi, g), g))
        keep = []
        for g in gens:
            sub = ToricMonoid(keep, self.n) if keep else None
            if sub is not None and sub.in_saturation(g) and sub._reachable(g):
                continue
            keep.append(g)
        return tuple(sorted(keep))

    def key(self):
        if self.is_sharp:
            return (self.n, self.minimal_generators)
        return (self.n, tuple(self.group_basis), self.cone.key(), self.is_saturated, self.generators)

    def __eq__(self, other):
        return isinstance(other, ToricMonoid) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def to_json(self):
        return {"rank": self.n, "generators": [list(g) for g in self.generators]}

    @classmethod
    def from_json(cls, d):
        return cls([tuple(g) for g in d.get("generators", [])], d["rank"])

    def elements_up_to(self, bound: int) -> list:
        """Elements with positive-functional value at most ``bound`` (sharp)."""
        phi = self.positive_functional
        seen = {la.zero(self.n)}
        frontier = [la.zero(self.n)]
        while frontier:
            nxt = []
            for x in frontier:
                for g in self.generators:
                    y = la.add(x, g)
                    if la.dot(phi, y) <= bound and y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return sorted(seen, key=lambda v: (la.dot(phi, v), v))


def _box_points(basis, d):
    """Lattice points of Z^d in the half-open parallelepiped of ``basis``."""
    lo = [0] * d
    hi = [0] * d
    for b in basis:
        for i in range(d):
            if b[i] < 0:
                lo[i] += b[i]
            else:
                hi[i] += b[i]
    bt = la.transpose(basis)
    pts = []
    for x in product(*[range(lo[i], hi[i] + 1) for i in range(d)]):
        lam = la.solve(bt, list(x), d)
        if all(0 <= c < 1 for c in lam):
            pts.append(x)
    return pts


def _saturation_generators(m: ToricMonoid, basis=None) -> list:
    """Hilbert basis of L ∩ cone(M), L = M^gp unless another basis is given."""
    basis = list(m.group_basis if basis is None else basis)
    d = len(basis)
    if d == 0:
        return []
    coords = lambda x: la.lattice_coords(x, basis)
    cone_gc = Cone([coords(g) for g in m.generators], d)
    spanning = [tuple(r) for r in cone_gc.rays]
    for l in cone_gc.lineality:
        spanning.append(tuple(l))
        spanning.append(tuple(-x for x in l))
    cand = set(spanning)
    for sub in combinations(spanning, d):
        if la.rank(list(sub)) < d:
            continue
        for x in _box_points(list(sub), d):
            if any(x):
                cand.add(tuple(x))
    cand = sorted(cand)
    if cone_gc.is_pointed:
        phi = la.zero(d)
        for f in cone_gc.facets:
            phi = la.add(phi, f)
        cand.sort(key=lambda v: (la.dot(phi, v), v))
        keep = []
        for x in cand:
            if any(cone_gc.contains(la.sub(x, h)) for h in keep):
                continue
            keep.append(x)
        cand = keep
    out = []
    for c in cand:
        v = la.zero(m.n)
        for ci, b in zip(c, basis):
            v = la.add(v, la.scale(ci, b))
        out.append(v)
    return out


def saturate(m: ToricMonoid, lattice: str = "group") -> ToricMonoid:
    """M^gp ∩ cone(M); with lattice="ambient", Z^n ∩ cone(M) instead."""
    if lattice == "group":
        return ToricMonoid(m.hilbert_basis, m.n)
    if lattice == "ambient":
        basis = la.saturated_basis(m.generators, m.n)
        return ToricMonoid(_saturation_generators(m, basis), m.n)
    raise MonoidError(f"unknown lattice {lattice!r}")


def free_monoid(r: int) -> ToricMonoid:
    return ToricMonoid([tuple(int(i == j) for j in range(r)) for i in range(r)], r)


# -- ideals and homomorphisms -------------------------------------------------

class MonoidIdeal:
    def __init__(self, parent: ToricMonoid, generators=()):
        self.parent = parent
        gens = [tuple(int(x) for x in g) for g in generators]
        for g in gens:
            if not parent.contains(g):
                raise MonoidError(f"ideal generator {g} is not in the parent monoid")
        self.generators = tuple(sorted(set(gens)))

    def __repr__(self):
        return f"MonoidIdeal({[list(g) for g in self.generators]})"

    def contains(self, x) -> bool:
        x = tuple(int(v) for v in x)
        if not self.parent.contains(x):
            raise MonoidError(f"{x} is not in the parent monoid")
        return any(self.parent.contains(la.sub(x, g)) for g in self.generators)

    def to_json(self):
        return {"generators": [list(g) for g in self.generators]}


def ideal_membership(x, ideal: MonoidIdeal) -> bool:
    return ideal.contains(x)


def ideal_from_generators(parent: ToricMonoid, generators) -> MonoidIdeal:
    return MonoidIdeal(parent, generators)


def _apply(matrix, x):
    y = la.matvec(matrix, x)
    out = []
    for v in y:
        v = Fraction(v)
        if v.denominator != 1:
            raise MonoidError(f"non-integral image {y}")
        out.append(int(v))
    return tuple(out)


@dataclass(frozen=True)
class MonoidHom:
    source: ToricMonoid
    target: ToricMonoid
    matrix: tuple

    def __post_init__(self):
        object.__setattr__(self, "matrix", tuple(tuple(r) for r in self.matrix))
        if len(self.matrix) != self.target.n or any(len(r) != self.source.n for r in self.matrix):
            raise MonoidError("matrix shape does not match the ambient lattices")
        for g in self.source.generators:
            if not self.target.contains(self(g)):
                raise MonoidError(f"generator {g} maps outside the target monoid")

    def __call__(self, x):
        return _apply(self.matrix, x)

    @property
    def is_local(self) -> bool:
        return all(any(self(g)) for g in self.source.generators)

    def group_rank_image(self) -> int:
        return la.rank([self(g) for g in self.source.generators])

    @property
    def injective_on_groups(self) -> bool:
        return self.group_rank_image() == self.source.group_rank


def identity_hom(m: ToricMonoid) -> MonoidHom:
    return MonoidHom(m, m, [tuple(int(i == j) for j in range(m.n)) for i in range(m.n)])


# -- pushouts -----------------------------------------------------------------

@dataclass(frozen=True)
class Pushout:
    monoid: ToricMonoid
    map1: object     # callable on the ambient lattice of P1
    map2: object
    common_lattice: bool


def pushout_data(h1: MonoidHom, h2: MonoidHom) -> Pushout:
    """Fine pushout P1 ⊕_Q P2 with its two canonical maps."""
    q = h1.source
    if h2.source.key() != q.key() or h1.source.n != h2.source.n:
        raise MonoidError("homomorphisms must share the source monoid")
    p1, p2 = h1.target, h2.target
    # shortcut: both targets in one lattice and the maps agree there
    if p1.n == p2.n and all(h1(g) == h2(g) for g in q.generators):
        b1, b2 = p1.group_basis, p2.group_basis
        d = p1.group_rank + p2.group_rank - la.rank([h1(g) for g in q.generators])
        joint = la.hnf(list(b1) + list(b2), p1.n)
        free_rank, torsion = _pushout_group(h1, h2)[1:]
        if not torsion and len(joint) == free_rank == d:
            ident = lambda x: tuple(int(v) for v in x)
            gens = list(p1.generators) + list(p2.generators)
            return Pushout(ToricMonoid(gens, p1.n), ident, ident, True)
    v, free_rank, torsion = _pushout_group(h1, h2)
    if torsion:
        raise MonoidError(f"pushout group has torsion {torsion}; unsupported")
    d1, d2 = p1.group_rank, p2.group_rank
    r = d1 + d2 - free_rank

    def make(which):
        def f(x):
            c = (p1 if which == 1 else p2).group_coords(x)
            if c is None:
                raise MonoidError(f"{x} not in the group of P{which}")
            full = list(c) + [0] * d2 if which == 1 else [0] * d1 + list(c)
            row = [sum(full[i] * v[i][j] for i in range(d1 + d2)) for j in range(d1 + d2)]
            return tuple(row[r:])
        return f

    m1, m2 = make(1), make(2)
    gens = [m1(g) for g in p1.generators] + [m2(g) for g in p2.generators]
    return Pushout(ToricMonoid(gens, free_rank), m1, m2, False)


def _pushout_group(h1, h2):
    q, p1, p2 = h1.source, h1.target, h2.target
    d1, d2 = p1.group_rank, p2.group_rank
    rows = []
    for g in q.generators:
        rows.append(tuple(p1.group_coords(h1(g))) + tuple(-x for x in p2.group_coords(h2(g))))
    D = d1 + d2
    if not rows:
        return [[int(i == j) for j in range(D)] for i in range(D)], D, []
    _, dm, v = la.smith(rows)
    diag = [dm[i][i] for i in range(min(len(dm), D)) if dm[i][i] != 0]
    torsion = [x for x in diag if x > 1]
    return v, D - len(diag), torsion


def fine_pushout(h1: MonoidHom, h2: MonoidHom) -> ToricMonoid:
    return pushout_data(h1, h2).monoid


def fs_pushout(h1: MonoidHom, h2: MonoidHom) -> ToricMonoid:
    return saturate(fine_pushout(h1, h2))


def pushout_ideal(h1: MonoidHom, h2: MonoidHom, j1: MonoidIdeal, j2: MonoidIdeal) -> MonoidIdeal:
    po = pushout_data(h1, h2)
    fs = saturate(po.monoid)
    gens = [po.map1(g) for g in j1.generators] + [po.map2(g) for g in j2.generators]
    return MonoidIdeal(fs, gens)


# -- lengths ------------------------------------------------------------------

def complement_is_finite(q: ToricMonoid, k: MonoidIdeal) -> bool:
    if q.group_rank == 0:
        return True
    cone = q.cone
    for ray in cone.rays:
        if not any(la.rank([ray, g]) == 1 and la.dot(ray, g) > 0 for g in k.generators):
            return False
    return True


def ideal_complement(q: ToricMonoid, k: MonoidIdeal) -> list:
    if not complement_is_finite(q, k):
        raise MonoidError("complement is infinite")
    start = la.zero(q.n)
    if k.contains(start):
        return []
    gens = q.hilbert_basis if q.is_saturated else q.generators
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for g in gens:
            y = la.add(x, g)
            if y not in seen and not k.contains(y):
                seen.add(y)
                stack.append(y)
    return sorted(seen)


def quotient_length(q: ToricMonoid, k: MonoidIdeal):
    if not q.is_sharp:
        raise MonoidError("quotient_length needs a sharp monoid")
    if not complement_is_finite(q, k):
        return INFINITE
    return len(ideal_complement(q, k))


@dataclass(frozen=True)
class LambdaReport:
    a: Fraction
    b: Fraction
    lam: int
    bound: Fraction
    length_q: object
    length_q_lambda: object
    iso_on_reduced: bool
    multiplicities_equal: bool
    complements_biject: bool
    asserted: bool
    q_lambda: ToricMonoid = field(compare=False)


def lambda_stability(q: ToricMonoid, ell_q, delta, mu: int, lam: int, theta_ell) -> LambdaReport:
    """Compare the length of Q/K with that of Q_lambda modulo K' ∪ J'_lambda.

    ``theta_ell`` is the image of ell in Q^gp; it is written as a*ell_q + b*delta.
    """
    ell_q, delta, theta_ell = (tuple(int(x) for x in v) for v in (ell_q, delta, theta_ell))
    if q.group_rank != 2 or not q.is_saturated or not q.is_sharp:
        raise MonoidError("Q must be a rank-2 sharp fs monoid")
    if la.rank([ell_q, delta]) != 2:
        raise MonoidError("ell_q and delta must be linearly independent")
    sol = la.solve(la.transpose([ell_q, delta]), list(theta_ell), 2)
    if sol is None:
        raise MonoidError("theta(ell) is not in the span of ell_q and delta")
    a, b = sol
    bound = a + b + mu * a
    if lam < bound:
        raise LambdaTooSmall(f"lambda={lam} below sufficiency bound {bound}")
    k_gens = [delta, la.sub(ell_q, la.scale(mu, delta))]
    if Cone(k_gens, q.n) != q.cone:
        raise MonoidError("Q must be rationally generated by delta and ell_q - mu*delta")
    k = MonoidIdeal(q, k_gens)
    r = free_monoid(2)
    r_lam = ToricMonoid([(1, -lam), (0, 1)], 2)
    theta = MonoidHom(r, q, la.transpose([theta_ell, delta]))
    incl = MonoidHom(r, r_lam, [(1, 0), (0, 1)])
    po = pushout_data(theta, incl)
    q_lam = saturate(po.monoid)
    j_lam = MonoidIdeal(r_lam, r_lam.generators)
    ideal = MonoidIdeal(q_lam, [po.map1(g) for g in k.generators] +
                        [po.map2(g) for g in j_lam.generators])
    len_q = quotient_length(q, k)
    len_l = quotient_length(q_lam, ideal)
    finite = len_q != INFINITE and len_l != INFINITE
    same_group = la.rank([po.map1(g) for g in q.group_basis]) == q_lam.group_rank == 2 and \
        _unimodular_on_groups(q, q_lam, po.map1)
    iso = finite and len_q > 0 and len_l > 0 and same_group
    biject = False
    if finite and same_group:
        lat = [po.map1(delta), po.map1(ell_q)]
        res_q = [_residue(po.map1(x), lat) for x in ideal_complement(q, k)]
        res_l = [_residue(x, lat) for x in ideal_complement(q_lam, ideal)]
        biject = (len(set(res_q)) == len(res_q) == len(res_l) == len(set(res_l))
                  and set(res_q) == set(res_l) and len(res_q) == _index(lat))
    return LambdaReport(a, b, lam, bound, len_q, len_l, iso, len_q == len_l, biject,
                        asserted=(a == 1), q_lambda=q_lam)


def _unimodular_on_groups(q, target, f) -> bool:
    imgs = [f(b) for b in q.group_basis]
    basis = target.group_basis
    coords = [la.lattice_coords(v, basis) for v in imgs]
    if any(c is None for c in coords):
        return False
    return abs(la.det(coords)) == 1


def _index(lat) -> int:
    return abs(la.det(lat))


def _residue(x, lat):
    """Canonical representative of x modulo the full-rank lattice spanned by ``lat``."""
    c = la.solve(la.transpose(lat), list(x), len(lat))
    frac = [v - (v.numerator // v.denominator) for v in c]
    return tuple(frac)


# -- integrality and fibre dimensions -----------------------------------------

def _is_free(m: ToricMonoid) -> bool:
    return m.is_sharp and m.is_saturated and len(m.hilbert_basis) == m.group_rank


def is_integral(theta: MonoidHom) -> bool:
    """Face criterion for theta: N^r -> Q on the dual map of cones."""
    src, tgt = theta.source, theta.target
    if not _is_free(src):
        raise MonoidError("is_integral needs a free source monoid")
    if not tgt.is_saturated:
        raise MonoidError("target must be saturated")
    basis = list(src.hilbert_basis)
    d = tgt.group_rank
    r = len(basis)
    cols = [tgt.group_coords(theta(e)) for e in basis]      # r vectors in Z^d
    sigma_q = Cone([tgt.group_coords(g) for g in tgt.generators], d).dual() if d else Cone([], 0)
    sigma_p = Cone([tuple(int(i == j) for j in range(r)) for i in range(r)], r)
    tmat = [tuple(c) for c in cols]          # r x d: phi -> (phi . c_j)_j
    if d == 0:
        return True
    for face in sigma_q.faces():
        img = face.image(tmat)
        if not sigma_p.is_face(img):
            return False
    return True


def log_fibre_dim(theta: MonoidHom) -> int:
    if not theta.injective_on_groups:
        raise MonoidError("log_fibre_dim needs theta injective on groups")
    return theta.target.group_rank - theta.source.group_rank


# -- faces, localization, DVR data ---------------------------------------------

def face_of(q: ToricMonoid, subset) -> tuple:
    """Validate that ``subset`` lists the Hilbert-basis elements of a face."""
    subset = tuple(sorted(set(tuple(int(x) for x in s) for s in subset)))
    hb = q.hilbert_basis
    for s in subset:
        if s not in hb:
            raise MonoidError(f"{s} is not a Hilbert basis element")
    face = q.cone.minimal_face_containing(Cone(subset, q.n)) if subset else \
        q.cone.minimal_face_containing(Cone([], q.n))
    in_face = tuple(sorted(h for h in hb if face.contains(h)))
    if in_face != subset:
        raise MonoidError(f"{list(subset)} is not a face (face generated is {list(in_face)})")
    return subset


def localize_at_face(q: ToricMonoid, face):
    """Sharpened localization Q_K = image of Q in Q^gp / F^gp, with chi."""
    if not (q.is_saturated and q.is_sharp):
        raise MonoidError("only faces of sharp saturated monoids are supported")
    face = face_of(q, face)
    d = q.group_rank
    rows = [q.group_coords(f) for f in face]
    if rows:
        _, dm, v = la.smith(rows)
        rk = sum(1 for i in range(min(len(dm), d)) if dm[i][i])
    else:
        v = [[int(i == j) for j in range(d)] for i in range(d)]
        rk = 0
    # chi on ambient: x -> coords -> (coords V)[rk:]
    basis = q.group_basis
    # rational left inverse of the basis on its span
    piv = la.rref(basis, q.n)[1]
    sub = [[b[c] for c in piv] for b in basis]           # d x d, invertible
    inv = _inverse(sub)                                    # coords = x[piv] . inv
    coord_mat = [[Fraction(0)] * q.n for _ in range(d)]  # d x n
    for i in range(d):
        for k, c in enumerate(piv):
            coord_mat[i][c] = inv[k][i]
    chi_rows = []
    for j in range(rk, d):
        chi_rows.append(tuple(sum(v[i][j] * coord_mat[i][c] for i in range(d)) for c in range(q.n)))
    chi_rows = [tuple(int(x) if Fraction(x).denominator == 1 else x for x in r) for r in chi_rows]
    out_rank = d - rk
    img = [_apply(chi_rows, g) for g in q.generators] if chi_rows else []
    qk = saturate(ToricMonoid(img, out_rank)) if out_rank else ToricMonoid([], 0)
    chi = MonoidHom(q, qk, chi_rows) if out_rank else None
    return qk, chi


def _inverse(m):
    n = len(m)
    aug = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(m)]
    red, _ = la.rref(aug, 2 * n)
    return [row[n:] for row in red]


@dataclass(frozen=True)
class DvrLogData:
    monoid: ToricMonoid
    face: tuple
    u: tuple

    def __post_init__(self):
        object.__setattr__(self, "face", face_of(self.monoid, self.face))
        object.__setattr__(self, "u", tuple(int(x) for x in self.u))
        for f in self.face:
            if la.dot(self.u, f) <= 0:
                raise MonoidError(f"u is not positive on face generator {f}")


def dvr_morphism_exists(src: DvrLogData, dst: DvrLogData, phi: MonoidHom, phi_k: MonoidHom) -> bool:
    """src = (Q, F, u), dst = (Q', F', u'); phi: Q' -> Q, phi_k: Q'_K -> Q_K."""
    if phi.source.key() != dst.monoid.key() or phi.target.key() != src.monoid.key():
        raise MonoidError("phi must map Q' to Q")
    if not phi.is_local:
        raise MonoidError("phi is not local")
    qk, chi = localize_at_face(src.monoid, src.face)
    qk2, chi2 = localize_at_face(dst.monoid, dst.face)
    if chi is None or chi2 is None:
        raise MonoidError("generization map is trivial; nothing to compare")
    if phi_k.source.key() != qk2.key() or phi_k.target.key() != qk.key():
        raise MonoidError("phi_K must map Q'_K to Q_K")
    if not phi_k.is_local:
        raise MonoidError("phi_K is not local")
    for g in dst.monoid.generators:
        if chi(phi(g)) != phi_k(chi2(g)):
            raise MonoidError(f"square does not commute on {g}")
    return all(la.dot(src.u, phi(f)) == la.dot(dst.u, f) for f in dst.face)
