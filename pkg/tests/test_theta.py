import itertools
from fractions import Fraction

import pytest

from thetaring.invariants import InvariantTable, UnknownInvariant
from thetaring.io import load_geometry, load_table
from thetaring.theta import Contribution, ThetaElement, ThetaRing


@pytest.fixture(scope="module")
def blowup():
    g = load_geometry("blowup")
    return ThetaRing(g, load_table("blowup_table", g, "complete"))


def _t(R, cls, p, n=1):
    return R.theta(p, R.S.monomial(R.geom.cls(cls), n))


def test_running_example_products(blowup):
    R = blowup
    assert R.product("v1", "v2") == R.theta("s12:1,1")
    assert R.product("v2", "v3") == R.theta("s23:1,1") + _t(R, "L-E", "0")


def test_report_provenance(blowup):
    rep = blowup.multiply("v2", "v3")
    prov = {(c.a, repr(c.r)): c.provenance for c in rep.contributions}
    assert prov[((0, 0), "s23:1,1")] == "constant"
    assert prov[((1, 0), "0:")] == "table"
    total = ThetaElement(blowup.S)
    for c in rep.nonzero():
        total = total + ThetaElement.basis(blowup.S, c.r, blowup.S.monomial(c.a, c.n))
    assert total == rep.result
    assert rep.to_json()["result"]


def test_unit_and_zero(blowup):
    R = blowup
    x = R.theta("v2") + _t(R, "E", "s13:2,1", 3)
    assert R.multiply_elements(R.one(), x) == x
    assert R.multiply_elements(R.zero(), x).is_zero()
    assert R.product("0", "0") == R.one()
    assert R.check_unit(R.geom.points_up_to(3)).passed


def test_bilinearity(blowup):
    R = blowup
    x = R.theta("v2") + R.theta("v3")
    sq = R.multiply_elements(x, x)
    four = R.product("v2", "v2") + R.product("v2", "v3") + R.product("v3", "v2") + R.product("v3", "v3")
    assert sq == four
    c = R.S.monomial(R.geom.cls("E"), Fraction(1, 2))
    assert R.multiply_elements(x.scale(c), x) == sq.scale(c)


def test_commutativity(blowup):
    assert blowup.check_commutativity(blowup.geom.points_up_to(3)).passed


def test_strict_policy_propagates():
    g = load_geometry("blowup")
    R = ThetaRing(g, load_table("blowup_table", g, "strict"))
    with pytest.raises(UnknownInvariant):
        R.product("s12:1,1", "s12:1,1")


def test_torus_grading(blowup):
    R = blowup
    reps = R.products(R.geom.points_up_to(3))
    assert R.check_torus_grading(reps).passed
    # the t^[L-E] theta_0 term of theta_v2 theta_v3 at D2: 1 + 0 = 0 + (L-E).D2
    g = R.geom
    assert g.curves.divisor_pairing("D2", g.cls("L-E")) == 1
    assert R.check_degree_grading(reps).checked == 0


def test_torus_grading_catches_bad_terms():
    g = load_geometry("blowup")
    R = ThetaRing(g, load_table("blowup_table", g, "complete"))
    rep = R.multiply("v2", "v3")
    rep.contributions.append(Contribution((0, 1), g.point("v1"), Fraction(1), "table"))
    assert not R.check_torus_grading([rep]).passed


def test_degree_grading_relative():
    g = load_geometry("relative_toy")
    R = ThetaRing(g, load_table("relative_toy_table", g, "complete"))
    reps = R.products(g.points_up_to(3))
    rep = R.check_degree_grading(reps)
    assert rep.passed and rep.checked > 0


def test_rees(blowup):
    R = blowup
    reps = R.products(R.geom.points_up_to(2))
    rep, gens = R.rees({}, reps, 2)
    assert rep.passed
    assert (0, R.geom.point("0")) in gens
    rep, gens = R.rees({"D2": 1}, reps, 2)
    assert rep.passed
    assert (0, R.geom.point("v2")) not in gens and (1, R.geom.point("v2")) in gens
    with pytest.raises(ValueError):
        R.rees({"D1": -1}, reps, 2)


def test_rees_violation_reported():
    g = load_geometry("blowup")
    t = InvariantTable(policy="complete")
    R = ThetaRing(g, t)
    rep = R.multiply("v1", "v2")
    rep.contributions.append(Contribution((0, 0), g.point("r2:5"), Fraction(1), "table"))
    out, _ = R.rees({"D2": 1}, [rep], 2)
    assert not out.passed and "r2:5" in out.failures[0]


def test_p1_products_vanish_across_rays():
    g = load_geometry("p1")
    R = ThetaRing(g, InvariantTable(policy="strict"))
    for a, b in itertools.combinations(["v1", "v2", "v3"], 2):
        rep = R.multiply(a, b)
        assert rep.result.is_zero()
        assert all(c.provenance in ("filtered-zero", "constant") for c in rep.contributions)


def test_text_form_is_sorted(blowup):
    x = blowup.product("s12:1,1", "v3")
    assert x.to_text() == "1/1 t^[1,1] theta{0:} + 1/1 t^[1,0] theta{r1:1}"
