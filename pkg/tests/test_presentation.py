import itertools

import pytest

from thetaring.io import load_geometry, load_presentation, load_table
from thetaring.presentation import (NonConfluent, PresentationError, PresentationTable, find_presentation,
                                    presentation_eval, presentation_from_json)
from thetaring.theta import CheckReport, ThetaRing


@pytest.fixture(scope="module")
def blowup():
    g = load_geometry("blowup")
    return g, load_presentation("blowup_presentation", g)


@pytest.fixture(scope="module")
def line_conic():
    g = load_geometry("line_conic")
    return g, load_presentation("line_conic_presentation", g)


def _t(g, cls, p, n=1):
    return ThetaRing(g).theta(p, g.ring.monomial(g.cls(cls), n))


def test_eval_defining_relation(blowup):
    g, pres = blowup
    got = presentation_eval(pres, ["v1", "v2", "v3"])
    assert got == _t(g, "L", "0") + _t(g, "L-E", "v1")
    assert presentation_eval(pres, []) == ThetaRing(g).one()
    assert presentation_eval(pres, ["v1", "v2"]) == ThetaRing(g).theta("s12:1,1")


def test_line_conic_presentation(line_conic):
    g, pres = line_conic
    R = ThetaRing(g)
    assert presentation_eval(pres, ["v1", "v2"]) == R.theta("vs1") + R.theta("vs2")
    assert presentation_eval(pres, ["vs1", "vs2"]) == _t(g, "line", "v1")


def test_confluence(blowup, line_conic):
    assert blowup[1].check_confluence(4) > 0
    assert line_conic[1].check_confluence(4) > 0


def test_non_confluent_detected():
    # v1 v2 is monomial in s12, so a relation sending it elsewhere is a critical pair
    g = load_geometry("blowup")
    d = {"variables": {"v1": "v1", "v2": "v2"},
         "relations": [{"lhs": ["v1", "v2"], "rhs": [{"coef": [{"A": "L", "N": "1"}], "word": []}]}]}
    pres = presentation_from_json(g, d)
    with pytest.raises(NonConfluent, match="critical pair"):
        pres.check_confluence(2)


def test_ambiguous_monomial_cones():
    g = load_geometry("line_conic")
    pres = presentation_from_json(g, {"variables": {"v1": "v1", "v2": "v2"}, "relations": []})
    with pytest.raises(PresentationError, match="disagree"):
        presentation_eval(pres, ["v1", "v2"])


def test_no_rule_reduces():
    g = load_geometry("blowup")
    pres = presentation_from_json(g, {"variables": {"v1": "v1", "w": "w"}, "relations": [],
                                      "monomial_rule": False})
    with pytest.raises(PresentationError, match="no rule"):
        presentation_eval(pres, ["v1", "w"])


def test_find_presentation_bound_one():
    g = load_geometry("blowup")
    R = ThetaRing(g, load_table("blowup_table", g, "complete"))
    fp = find_presentation(R, ["v1", "v2", "v3"], 1, names=["v1", "v2", "v3"])
    assert fp.defining == [] and fp.identifications == []


def test_find_presentation_rejects_bad_generators():
    g = load_geometry("blowup")
    R = ThetaRing(g)
    with pytest.raises(PresentationError):
        find_presentation(R, ["v1", "v1"], 2)
    with pytest.raises(PresentationError):
        find_presentation(R, ["0", "v1"], 2)


def _round_trip(g, R, names, bound):
    fp = find_presentation(R, names, bound, names=names)
    found = fp.presentation
    gens = [g.point(n) for n in names]
    n = 0
    for d in range(1, bound + 1):
        for word in itertools.combinations_with_replacement(gens, d):
            assert presentation_eval(found, list(word)) == R.monomial(word), word
            n += 1
    return fp, n


def test_round_trip_line_conic(line_conic):
    g, pres = line_conic
    R = ThetaRing(g, PresentationTable(pres))
    fp, n = _round_trip(g, R, ["v1", "v2", "vs1", "vs2"], 3)
    assert n == 4 + 10 + 20
    assert [fp.presentation.relation_text(r) for r in fp.defining] == [
        "theta[v1]*theta[v2] = (1/1 t^[0]) theta[vs1] + (1/1 t^[0]) theta[vs2]",
        "theta[vs1]*theta[vs2] = (1/1 t^[1]) theta[v1]"]


def test_round_trip_blowup(blowup):
    g, pres = blowup
    fp, n = _round_trip(g, ThetaRing(g, PresentationTable(pres)), ["v1", "v2", "v3"], 3)
    assert n == 3 + 6 + 10
    assert len(fp.defining) == 1


def test_presentation_table_associative(blowup):
    g, pres = blowup
    R = ThetaRing(g, PresentationTable(pres))
    rep = CheckReport("associativity")
    pts = g.points_up_to(2)
    for a, b, c in itertools.product(pts, repeat=3):
        R.check_associativity(a, b, c, rep)
    assert rep.passed, rep.to_text()


def test_supplied_blowup_table_is_not_associative():
    # the four-entry table omits invariants the ring needs; the checker must say so
    g = load_geometry("blowup")
    R = ThetaRing(g, load_table("blowup_table", g, "complete"))
    rep = CheckReport("associativity")
    for a, b, c in itertools.product(g.points_up_to(2), repeat=3):
        R.check_associativity(a, b, c, rep)
    assert not rep.passed
