import copy
import json

import pytest

from thetaring import tropical as T
from thetaring.cones import Cone
from thetaring.io import read_json

QUADRANT = {"name": "quadrant", "divisors": ["D1", "D2"], "derive_parents": True,
            "strata": [{"id": "0", "labels": []}, {"id": "r1", "labels": ["D1"]},
                       {"id": "r2", "labels": ["D2"]}, {"id": "s12", "labels": ["D1", "D2"]}]}


def fam(name):
    return T.family_from_json(read_json(name))


def quadrant_chain(x_near=("x1",), x_far=("x2", "x3")):
    """Two-vertex chain in a quadrant over Q = N^2 with coordinates (delta, l)."""
    u = {"E1": [0, 1], "out": [-1, 0], "x1": [1, 0], "x2": [0, 1], "x3": [1, 1]}
    bs = {"v": "r1", "w": "s12", "E1": "s12", "out": "r1", "x1": "r1", "x2": "s12", "x3": "s12"}
    if "x3" in x_near:
        u["x3"], bs["x3"] = [1, 0], "r1"
    return {"name": "quadrant_chain", "complex": QUADRANT,
            "graph": {"vertices": ["v", "w"], "edges": [{"id": "E1", "from": "v", "to": "w"}],
                      "legs": [{"name": "out", "vertex": "v"}] +
                              [{"name": x, "vertex": "v"} for x in x_near] +
                              [{"name": x, "vertex": "w"} for x in x_far]},
            "bsigma": bs, "u": u, "base": {"rank": 2, "generators": [[1, 0], [0, 1]]},
            "nu": {"v": [[1, 0], [0, 0]], "w": [[1, 0], [0, 1]]},
            "lengths": {"E1": [0, 1]}, "delta": [1, 0], "r": [1, 0]}


def test_fixtures_validate():
    for name in ("trop_figure5", "trop_figure6", "trop_figure7", "trop_figure8", "trop_fourpointed"):
        rep = T.validate_family(fam(name))
        assert rep.valid, (name, rep.issues)


def test_boundary_classes_and_tails():
    assert T.boundary_class(fam("trop_figure5")) == "D(x2x3|x1,out)"
    assert T.boundary_class(fam("trop_figure7")) == "D(x1x2|x3,out)"
    assert T.classify_tails(fam("trop_figure5")) == "tail_free"
    assert T.splitting_edges(fam("trop_figure5")) == [1]
    assert T.splitting_edges(fam("trop_figure6")) == [2]
    assert T.classify_tails(fam("trop_figure7")) == "terminal"
    assert T.classify_tails(fam("trop_figure8")) == "internal"
    assert T.splitting_edges(fam("trop_figure8")) == [1, 2]


def test_universal_cones():
    for name, d in (("trop_figure5", 2), ("trop_figure6", 2), ("trop_figure7", 3)):
        f = fam(name)
        assert T.universal_cone(f).dim == d, name
    assert T.is_miniversal(fam("trop_figure5"))
    assert T.base_dim(fam("trop_figure7")) == 3 and T.is_miniversal(fam("trop_figure7"))
    assert T.image_condition(fam("trop_figure5"))


def test_single_vertex_is_interior():
    d = {"name": "star", "complex": QUADRANT,
         "graph": {"vertices": ["v"], "edges": [],
                   "legs": [{"name": n, "vertex": "v"} for n in ("out", "x1", "x2", "x3")]},
         "bsigma": {"v": "0", "out": "0", "x1": "0", "x2": "0", "x3": "0"},
         "u": {n: [0, 0] for n in ("out", "x1", "x2", "x3")},
         "base": {"rank": 2, "generators": [[1, 0], [0, 1]]},
         "nu": {"v": [[0, 0], [0, 0]]}, "lengths": {}, "delta": [1, 0], "r": [0, 0]}
    f = T.family_from_json(d)
    assert T.validate_family(f).valid
    assert T.boundary_class(f) == "interior"
    assert T.universal_cone(f).dim == 1


def test_perturbed_u_is_invalid():
    d = read_json("trop_figure5")
    d = copy.deepcopy(d)
    d["u"]["E1"] = [0, 2, 0]
    rep = T.validate_family(T.family_from_json(d))
    assert not rep.valid and any("E1" in i for i in rep.issues)


def test_constant_type_dimension():
    d = {"name": "const", "complex": QUADRANT,
         "graph": {"vertices": ["a", "b", "c"],
                   "edges": [{"id": "E1", "from": "a", "to": "b"}, {"id": "E2", "from": "b", "to": "c"}],
                   "legs": [{"name": "out", "vertex": "a"}, {"name": "x1", "vertex": "a"},
                            {"name": "x2", "vertex": "c"}, {"name": "x3", "vertex": "c"}]},
         "bsigma": {k: "0" for k in ("a", "b", "c", "E1", "E2", "out", "x1", "x2", "x3")},
         "u": {k: [0, 0] for k in ("E1", "E2", "out", "x1", "x2", "x3")},
         "base": {"rank": 2, "generators": [[1, 0], [0, 1]]},
         "nu": {v: [[0, 0], [0, 0]] for v in "abc"},
         "lengths": {"E1": [1, 0], "E2": [0, 1]}, "delta": [1, 1], "r": [0, 0]}
    f = T.family_from_json(d)
    assert T.validate_family(f).valid
    assert T.universal_cone(f).dim == 1 + len(f.edges)


def test_quadrant_chain_splits():
    f = T.family_from_json(quadrant_chain())
    assert T.validate_family(f).valid, T.validate_family(f).issues
    assert T.boundary_class(f) == "D(x2x3|x1,out)"
    assert T.universal_cone(f).dim == 2 and T.is_miniversal(f)
    res = T.find_splitting_edge(f)
    assert res.index == 1 and res.independent and res.u_in_cone
    parts = T.split_at_edge(f, 1)
    assert all(T.validate_family(p).valid for p in parts)
    assert T.glue(*parts, name=f.name).canonical() == f.canonical()


def test_boundary_class_other_side():
    f = T.family_from_json(quadrant_chain(("x1", "x3"), ("x2",)))
    # w now carries a single x-leg, so it is no longer a branch vertex
    assert T.boundary_class(f) == "interior"
    d = quadrant_chain(("x2",), ("x1", "x3"))
    d["u"]["x1"], d["bsigma"]["x1"] = [0, 1], "s12"
    d["u"]["x2"], d["bsigma"]["x2"] = [1, 0], "r1"
    g = T.family_from_json(d)
    assert T.validate_family(g).valid
    assert T.boundary_class(g) == "D(x1x3|x2,out)"
    d["graph"]["legs"].append({"name": "y", "vertex": "w"})
    d["u"]["y"], d["bsigma"]["y"] = [0, 1], "s12"
    with pytest.raises(T.TropicalError):
        T.boundary_class(T.family_from_json(d))


def test_fig7_out_vertex_and_terminal_tail():
    f = fam("trop_figure7")
    assert T.has_terminal_tail(f)
    assert not T.has_terminal_tail(fam("trop_figure5"))
    with pytest.raises(T.AssumptionViolation):
        T.find_splitting_edge(f)


def test_all_lengths_proportional_to_delta():
    d = quadrant_chain()
    d["lengths"]["E1"] = [1, 0]
    d["nu"]["w"] = [[1, 0], [1, 0]]
    f = T.family_from_json(d)
    assert T.validate_family(f).valid
    assert T.splitting_edges(f) == []
    assert any("image" in b or "miniversal" in b for b in T.check_assumptions(f))
    with pytest.raises(T.AssumptionViolation):
        T.classify_tails(f)


def test_split_glue_round_trip():
    for name in ("trop_figure5", "trop_figure6"):
        f = fam(name)
        i = T.find_splitting_edge(f).index
        b1, b2 = T.split_at_edge(f, i)
        assert b1.r == tuple(-x for x in b1.leg("out").u)
        assert b2.leg("s").length is not None
        assert T.glue(b1, b2, name=f.name).canonical() == f.canonical()
    f6 = fam("trop_figure6")
    with pytest.raises(T.TropicalError, match="splitting type"):
        T.split_at_edge(f6, 1)


def test_relabel_invariance():
    for name in ("trop_figure5", "trop_figure6", "trop_figure7"):
        d = read_json(name)
        ren = {v: f"n{i}" for i, v in enumerate(d["graph"]["vertices"])}
        ren.update({e["id"]: f"F{i}" for i, e in enumerate(d["graph"]["edges"])})
        s = json.dumps(d)
        for old, new in sorted(ren.items(), key=lambda kv: -len(kv[0])):
            s = s.replace(f'"{old}"', f'"{new}"')
        g = T.family_from_json(json.loads(s))
        assert T.validate_family(g).valid
        assert T.universal_cone(g).dim == T.universal_cone(fam(name)).dim


def test_json_round_trip():
    for name in ("trop_figure5", "trop_figure8"):
        f = fam(name)
        again = T.family_from_json(json.loads(json.dumps(f.to_json())))
        assert again.canonical() == f.canonical()
    with pytest.raises(T.TropicalError, match="missing"):
        T.family_from_json({"complex": QUADRANT})


def test_fibre_product_with_identity():
    s1 = Cone([(1, 0), (1, 2)], 2)
    f1 = T.ConeMap(s1, ((1, 0), (0, 1)))
    f2 = T.ConeMap(Cone([(1, 0), (0, 1)], 2), ((1, 0), (0, 1)))
    fp = T.cone_fibre_product(f1, f1)
    assert fp.dim == 2
    proj = [(1, 0, 0, 0), (0, 1, 0, 0)]
    assert fp.image(proj) == s1
    assert T.face_surjection_check(f1, T.ConeMap(s1, ((1, 0), (0, 1))))
    assert T.cone_fibre_product(f1, f2).image(proj) == s1
    with pytest.raises(T.TropicalError, match="limit"):
        T.ConeMap(Cone([(1, 0, 0, 0, 0)], 5), ((1, 0, 0, 0, 0),))
    with pytest.raises(T.TropicalError, match="targets"):
        T.cone_fibre_product(f1, T.ConeMap(s1, ((1, 0),)))


def test_psi_y_rays():
    m = T.psi_y_map(2)
    assert m.source.image(m.matrix) == Cone([(2, 1), (1, 0)], 2)
    half = T.psi_y_map("3/2")
    assert half.source.image(half.matrix) == Cone([(3, 2), (1, 0)], 2)
