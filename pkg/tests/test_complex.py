import pytest
from hypothesis import given, settings, strategies as st

from thetaring.complex import (ComplexError, IntegralPoint, RelativeData, StrataPoset, Stratum,
                               build_complex, degree, ks_skeleton)
from thetaring.io import load_geometry


@pytest.fixture(scope="module")
def blowup():
    return load_geometry("blowup").full


@pytest.fixture(scope="module")
def line_conic():
    return load_geometry("line_conic").full


def test_blowup_complex_shape(blowup):
    assert blowup.summary() == {"cones": 7, "by_dim": {0: ["0"], 1: ["r1", "r2", "r3"],
                                                       2: ["s12", "s13", "s23"]}}
    assert sorted(blowup.maximal_cones()) == ["s12", "s13", "s23"]


def test_line_conic_has_five_cones(line_conic):
    s = line_conic.summary()
    assert s["cones"] == 5
    assert s["by_dim"][2] == ["s1", "s2"]
    assert line_conic.cone_labels["s1"] == line_conic.cone_labels["s2"] == ("D1", "D2")


def test_single_divisor():
    cx = build_complex(StrataPoset.snc(["D"], [("D",)]))
    assert cx.summary()["by_dim"] == {0: ["0"], 1: ["D"]}


def test_bad_posets():
    with pytest.raises(ComplexError):
        build_complex(StrataPoset.snc(["D1"], [("D2",)]))
    with pytest.raises(ComplexError):
        # a 2-cone whose facets are missing
        build_complex(StrataPoset(("D1", "D2"), (Stratum("0", ()), Stratum("s", ("D1", "D2")))))
    with pytest.raises(ComplexError):
        StrataPoset.snc(["D1", "D2"], [("D1", "D2"), ("D1", "D2")], ids=["0", "a", "b"])


def test_pairing(blowup, line_conic):
    v1 = blowup.point("r1", [1])
    assert blowup.pairing(v1, "D1") == 1 and blowup.pairing(v1, "D2") == 0
    p = blowup.point("s12", [1, 2])
    assert blowup.pairing(p, "D2") == 2
    assert line_conic.pairing(line_conic.point("s1", [1, 1]), "D2") == 1
    with pytest.raises(ComplexError):
        blowup.pairing(v1, "D9")


def test_canonicalization(blowup):
    p = blowup.point("s12", [3, 0])
    assert p == IntegralPoint("r1", (3,))
    assert blowup.point(p.cone, p.coords) == p
    assert blowup.point("s12", [0, 0]) == blowup.zero_point()


def test_sums_in_common_cones(blowup, line_conic):
    v1, v2 = blowup.point("r1", [1]), blowup.point("r2", [1])
    assert blowup.sums_in_common_cones(v1, v2) == [("s12", blowup.point("s12", [1, 1]))]
    w1, w2 = line_conic.point("r1", [1]), line_conic.point("r2", [1])
    assert line_conic.sums_in_common_cones(w1, w2) == [
        ("s1", line_conic.point("s1", [1, 1])), ("s2", line_conic.point("s2", [1, 1]))]
    assert blowup.sums_in_common_cones(blowup.zero_point(), v1) == [("r1", v1)]


def test_skeleton_cases():
    g = load_geometry("p1")
    sk = ks_skeleton(g.full, [0, 0, 1])
    assert sk.complex.summary()["by_dim"] == {0: ["0"], 1: ["r1", "r2"]}
    assert ks_skeleton(g.full, [0, 0, 0]).complex.cone_ids == g.full.cone_ids
    with pytest.raises(ComplexError):
        ks_skeleton(g.full, [0, -1, 0])


def test_relative_toy_normalization():
    cx = build_complex(StrataPoset.snc(["D1", "D2"], [("D1",), ("D2",), ("D1", "D2")]))
    sk = ks_skeleton(cx, [1, 2], RelativeData({"D1": 1, "D2": 1}, ("D1", "D2")))
    assert sk.good == frozenset({"D1"})
    assert sk.coefficients == (0, 1)


def test_degree():
    g = load_geometry("relative_toy")
    cx, rel = g.full, g.relative
    assert degree(cx, cx.zero_point(), rel) == 0
    assert degree(cx, cx.point("r2", [1]), rel) == 2
    p, q = cx.point("r1", [2]), cx.point("r2", [1])
    ((_, s),) = cx.sums_in_common_cones(p, q)
    assert degree(cx, s, rel) == degree(cx, p, rel) + degree(cx, q, rel)
    with pytest.raises(ComplexError):
        degree(cx, p, None)


def test_enumerate_points(blowup, line_conic):
    phi = {"D1": 1, "D2": 1, "D3": 1}
    assert blowup.enumerate_points(phi, 0) == [blowup.zero_point()]
    assert [repr(p) for p in blowup.enumerate_points(phi, 1)] == ["0:", "r1:1", "r2:1", "r3:1"]
    pts = line_conic.enumerate_points({"D1": 1, "D2": 1}, 2)
    assert sorted(map(repr, pts)) == ["0:", "r1:1", "r1:2", "r2:1", "r2:2", "s1:1,1", "s2:1,1"]
    with pytest.raises(ComplexError):
        blowup.enumerate_points({"D1": 1, "D2": 0, "D3": 1}, 2)


BLOWUP = load_geometry("blowup").full


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["s12", "s13", "s23"]), st.integers(0, 4), st.integers(0, 4),
       st.sampled_from(["s12", "s13", "s23"]), st.integers(0, 4), st.integers(0, 4))
def test_sums_symmetric_and_pairing_zero_off_support(c1, a, b, c2, x, y):
    cx = BLOWUP
    p, q = cx.point(c1, [a, b]), cx.point(c2, [x, y])
    assert cx.point(p.cone, p.coords) == p
    assert cx.sums_in_common_cones(p, q) == cx.sums_in_common_cones(q, p)
    for l in cx.labels:
        if l not in cx.cone_labels[p.cone]:
            assert cx.pairing(p, l) == 0
