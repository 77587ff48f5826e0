import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

import oracles as O
from thetaring import linalg as la
from thetaring.monoids import (INFINITE, DvrLogData, LambdaTooSmall, MonoidError, MonoidHom, MonoidIdeal,
                               ToricMonoid, fine_pushout, free_monoid, fs_pushout, identity_hom,
                               ideal_complement, ideal_membership, is_integral, lambda_stability,
                               localize_at_face, log_fibre_dim, pushout_ideal, quotient_length, saturate,
                               dvr_morphism_exists)

I2 = [(1, 0), (0, 1)]


def test_saturate_examples():
    m = ToricMonoid([(1, 0), (1, 2)], 2)
    amb = saturate(m, "ambient")
    assert amb.generators == ((1, 0), (1, 1), (1, 2))
    assert list(amb.generators) == O.hilbert_basis([(1, 0), (1, 2)])
    # (1,1) is not in the group generated by (1,0), (1,2)
    assert saturate(m).generators == ((1, 0), (1, 2))
    assert m.is_saturated
    assert saturate(free_monoid(2)) == free_monoid(2)
    r3 = ToricMonoid([(1, -3), (0, 1)], 2)
    assert saturate(r3) == r3 and saturate(r3, "ambient") == r3
    with pytest.raises(MonoidError):
        saturate(m, "other")


def test_non_saturated_flag():
    m = ToricMonoid([(2, 0), (3, 0), (0, 1)], 2)
    assert not m.is_saturated
    assert saturate(m).generators == ((0, 1), (1, 0))
    assert ToricMonoid([(2, 0), (1, 1), (0, 2)], 2).is_saturated
    m = ToricMonoid([(2,), (3,)], 1)
    assert not m.is_saturated and saturate(m).generators == ((1,),)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(-3, 3)), min_size=1, max_size=3))
def test_saturate_idempotent_and_extensive(gens):
    gens = [g for g in gens if any(g)]
    if not gens:
        return
    m = ToricMonoid(gens, 2)
    if not m.is_sharp:
        return
    s = saturate(m, "ambient")
    assert all(s.contains(g) for g in m.generators)
    assert saturate(s, "ambient") == s
    assert saturate(saturate(m)) == saturate(m)


def _h(src, tgt, mat):
    return MonoidHom(src, tgt, mat)


def test_fine_pushout_examples():
    Q = free_monoid(2)                      # coordinates (ell_q, delta)
    T = ToricMonoid([(0, 1), (1, -1)], 2)
    got = fine_pushout(identity_hom(Q), _h(Q, T, I2))
    assert saturate(got) == ToricMonoid([(0, 1), (1, 0), (1, -1)], 2)
    assert got.contains((1, -1)) and got.contains((1, 0)) and got.contains((0, 1))
    zero = free_monoid(0)
    cop = fine_pushout(_h(zero, free_monoid(1), [[]]), _h(zero, free_monoid(1), [[]]))
    assert cop.group_rank == 2 and len(cop.hilbert_basis) == 2 and cop.is_sharp
    N = free_monoid(1)
    diag = fine_pushout(_h(N, N, [[1]]), _h(N, N, [[1]]))
    assert diag.group_rank == 1 and diag.hilbert_basis == ((1,),)


def test_fs_pushout_unimodular_example():
    R = free_monoid(2)
    P1 = ToricMonoid([(0, 1), (1, -1)], 2)
    R3 = ToricMonoid([(1, -3), (0, 1)], 2)
    got = fs_pushout(_h(R, P1, I2), _h(R, R3, I2))
    assert got == ToricMonoid([(0, 1), (1, -3)], 2)
    assert list(got.hilbert_basis) == O.hilbert_basis([(0, 1), (1, -3)])


def test_fs_pushout_of_saturated_is_stable():
    Q = free_monoid(1)
    P = free_monoid(2)
    h = _h(Q, P, [[1], [1]])
    fine = fine_pushout(h, h)
    assert fine.is_saturated and fs_pushout(h, h) == saturate(fine)


def test_pushout_rejects_mismatched_sources():
    with pytest.raises(MonoidError):
        fine_pushout(identity_hom(free_monoid(1)), identity_hom(free_monoid(2)))


def test_pushout_ideals():
    Q = free_monoid(1)
    P = free_monoid(2)
    h = _h(Q, P, [[1], [1]])
    assert pushout_ideal(h, h, MonoidIdeal(P), MonoidIdeal(P)).generators == ()
    full = pushout_ideal(h, h, MonoidIdeal(P, P.generators), MonoidIdeal(P, P.generators))
    po = full.parent
    assert quotient_length(po, full) == 1


def test_ideal_membership():
    N2 = free_monoid(2)
    K = MonoidIdeal(N2, [(2, 0)])
    assert ideal_membership((3, 0), K) and not ideal_membership((1, 5), K)
    assert all(ideal_membership(g, K) for g in K.generators)
    assert not ideal_membership((0, 0), K)
    assert ideal_membership((0, 0), MonoidIdeal(N2, [(0, 0)]))
    with pytest.raises(MonoidError):
        ideal_membership((-1, 0), K)
    with pytest.raises(MonoidError):
        MonoidIdeal(N2, [(-1, 2)])


def test_quotient_length_examples():
    N2 = free_monoid(2)
    assert quotient_length(N2, MonoidIdeal(N2, I2)) == 1
    Q = saturate(ToricMonoid([(0, 1), (2, -1)], 2), "ambient")
    K = MonoidIdeal(Q, [(0, 1), (2, -1)])
    assert ideal_complement(Q, K) == [(0, 0), (1, 0)]
    assert quotient_length(Q, K) == 2 == abs(la.det([(0, 1), (2, -1)]))
    assert quotient_length(N2, MonoidIdeal(N2, [(1, 0)])) == INFINITE


def test_quotient_length_two_traversals():
    rng = random.Random(7)
    for _ in range(10):
        r1, r2 = (1, rng.randint(-2, 2)), (rng.randint(-2, 2), 1)
        if la.rank([r1, r2]) < 2:
            continue
        Q = saturate(ToricMonoid([r1, r2], 2), "ambient")
        K = [la.scale(rng.randint(1, 3), r1), la.scale(rng.randint(1, 3), r2)]
        got = quotient_length(Q, MonoidIdeal(Q, K))
        assert got == len(O.complement_by_growth([r1, r2], K)) == len(O.complement_by_box([r1, r2], K, 14))


def test_lambda_stability_example():
    delta, lq = (0, 1), (1, 0)
    Q = ToricMonoid([delta, (1, -1)], 2)
    rep = lambda_stability(Q, lq, delta, 1, 5, lq)
    assert rep.a == 1 and rep.b == 0
    assert rep.iso_on_reduced and rep.multiplicities_equal and rep.complements_biject and rep.asserted
    with pytest.raises(LambdaTooSmall):
        lambda_stability(Q, lq, delta, 1, 1, lq)


def test_lambda_stability_free_and_a2():
    delta, lq = (0, 1), (1, 0)
    Q = free_monoid(2)
    rep = lambda_stability(Q, lq, delta, 0, 2, lq)
    assert rep.length_q == rep.length_q_lambda == 1
    rep2 = lambda_stability(Q, lq, delta, 0, 3, (2, 0))
    assert rep2.a == 2 and not rep2.asserted


def test_lambda_stability_preconditions():
    with pytest.raises(MonoidError):
        lambda_stability(free_monoid(2), (1, 0), (2, 0), 0, 5, (1, 0))


def test_is_integral_examples():
    N1, N2 = free_monoid(1), free_monoid(2)
    assert is_integral(_h(N1, N2, [[1], [1]]))
    assert not is_integral(_h(N2, N2, [[1, 0], [1, 1]]))
    assert is_integral(identity_hom(N2))
    with pytest.raises(MonoidError):
        is_integral(_h(ToricMonoid([(2,), (3,)], 1), N1, [[1]]))


def test_is_integral_unimodular_invariance():
    rng = random.Random(11)
    unimodular = [[[1, 0], [0, 1]], [[1, 1], [0, 1]], [[2, 1], [1, 1]], [[0, 1], [1, 0]]]
    for _ in range(40):
        th = [[rng.randint(0, 3) for _ in range(2)] for _ in range(2)]
        U = rng.choice(unimodular)
        perm = rng.choice([[[1, 0], [0, 1]], [[0, 1], [1, 0]]])
        base = is_integral(_h(free_monoid(2), free_monoid(2), th))
        tgt = ToricMonoid([tuple(U[i][j] for i in range(2)) for j in range(2)], 2)
        moved = la.matmul(la.matmul(U, th), perm)
        assert is_integral(_h(free_monoid(2), tgt, moved)) == base


def test_log_fibre_dim():
    N1 = free_monoid(1)
    assert log_fibre_dim(_h(N1, free_monoid(2), [[1], [1]])) == 1
    assert log_fibre_dim(identity_hom(free_monoid(2))) == 0
    assert log_fibre_dim(_h(N1, free_monoid(3), [[1], [0], [2]])) == 2
    with pytest.raises(MonoidError):
        log_fibre_dim(_h(free_monoid(2), N1, [[1, 1]]))


def test_localize_at_face():
    N2 = free_monoid(2)
    qk, chi = localize_at_face(N2, [(1, 0)])
    assert qk == free_monoid(1)
    assert chi((1, 0)) == (0,) and chi((0, 1)) in ((1,), (-1,))
    same, chi0 = localize_at_face(N2, [])
    assert same.group_rank == 2 and sorted(chi0(g) for g in N2.generators) == sorted(same.hilbert_basis)
    Q = saturate(ToricMonoid([(0, 1), (2, -1)], 2), "ambient")
    qk, chi = localize_at_face(Q, [(0, 1)])
    assert qk == free_monoid(1)
    with pytest.raises(MonoidError):
        localize_at_face(Q, [(1, 0)])


def test_localize_kernel_is_face():
    Q = saturate(ToricMonoid([(0, 1), (3, -1)], 2), "ambient")
    for face in ([(0, 1)], [(3, -1)]):
        qk, chi = localize_at_face(Q, face)
        pts = [p for p in itertools.product(range(-4, 5), repeat=2) if Q.contains(p)]
        kernel = {p for p in pts if not any(chi(p))}
        assert kernel == {p for p in pts if la.rank([p, face[0]]) <= 1}
        assert {chi(g) for g in Q.hilbert_basis} >= set(qk.hilbert_basis)


def test_dvr_morphisms():
    N2 = free_monoid(2)
    d = DvrLogData(N2, [(1, 0)], (2, 0))
    qk, _ = localize_at_face(N2, [(1, 0)])
    assert dvr_morphism_exists(d, d, identity_hom(N2), identity_hom(qk))
    # rank-2 instance: Q' = N^2 -> Q = N^2, (a, b) -> (2a, b); u'(e1) = 2 u(e1)
    src = DvrLogData(N2, [(1, 0)], (3, 0))
    dst = DvrLogData(N2, [(1, 0)], (6, 0))
    phi = _h(N2, N2, [[2, 0], [0, 1]])
    assert dvr_morphism_exists(src, dst, phi, identity_hom(qk))
    dst_bad = DvrLogData(N2, [(1, 0)], (5, 0))
    assert not dvr_morphism_exists(src, dst_bad, phi, identity_hom(qk))
    with pytest.raises(MonoidError):
        DvrLogData(N2, [(1, 0)], (0, 1))
