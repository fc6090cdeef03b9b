import numpy as np
import pytest

from osserman_lab import octonion as O
from osserman_lab.numkit import projector


def e(i):
    return O.basis(i)


def test_unit_and_table(rng):
    a = rng.standard_normal(8)
    assert np.allclose(O.mul(O.ONE, a), a) and np.allclose(O.mul(a, O.ONE), a)
    assert np.array_equal(O.mul(e(1), e(2)), e(3))
    # doubling conventions: e4 = (0, 1), e5 = e1 e4, e6 = e2 e4, e7 = e3 e4
    for i, j, k in [(1, 4, 5), (2, 4, 6), (3, 4, 7)]:
        assert np.array_equal(O.mul(e(i), e(j)), e(k))


def test_table_signed_entries():
    T = O.signed_table()
    # 1-based signed basis index: e_i e_j = sign(T) e_(|T| - 1)
    assert T[0] == list(range(1, 9))
    assert T[1][2] == 4 and T[2][1] == -4
    for i in range(1, 8):
        assert T[i][i] == -1


def test_conj_and_inner():
    assert np.array_equal(O.conj(O.ONE), O.ONE)
    assert np.array_equal(O.conj(e(3)), -e(3))
    G = np.array([[O.inner(e(i), e(j)) for j in range(8)] for i in range(8)])
    assert np.array_equal(G, np.eye(8))


def test_identity_suite_real(rng):
    a, b, c = (O.random_octonions(rng, 1000) for _ in range(3))
    res = O.identity_residuals(a, b, c)
    assert max(res.values()) < 1e-12, res
    assert max(O.inverse_residuals(rng.standard_normal((200, 8))).values()) < 1e-12


def test_identity_suite_bioctonion(rng):
    a, b, c = (O.random_bioctonions(rng, 1000) for _ in range(3))
    assert max(O.identity_residuals(a, b, c).values()) < 1e-12


def test_zero_divisors():
    a, b = O.zero_divisor_pair()
    assert np.abs(O.mul(a, b)).max() == 0.0
    # not a division algebra: the Hermitian norm is not multiplicative here
    assert O.hermitian_norm(O.mul(a, b)) < O.hermitian_norm(a) * O.hermitian_norm(b) - 1


def test_right_mult_operators(rng):
    Js = [O.right_mult_operator(e(i)) for i in range(1, 8)]
    for i, Ji in enumerate(Js):
        assert np.allclose(Ji, -Ji.T)
        for j, Jj in enumerate(Js):
            target = -2 * np.eye(8) if i == j else 0
            assert np.abs(Ji @ Jj + Jj @ Ji - target).max() < 1e-14
    for _ in range(1000 // 50):
        u = rng.standard_normal((50, 8))
        u[:, 0] = 0
        X = rng.standard_normal((50, 8))
        JX = np.einsum("sij,sj->si", np.array([O.right_mult_operator(v) for v in u]), X)
        assert np.allclose(JX, O.mul(X, u), atol=1e-13)
        lhs = np.linalg.norm(JX, axis=1)
        assert np.abs(lhs - np.linalg.norm(u, axis=1) * np.linalg.norm(X, axis=1)).max() < 1e-12
    with pytest.raises(ValueError):
        O.right_mult_operator(O.ONE)


def test_left_mult_also_clifford():
    Ls = [O.left_mult_operator(e(i)) for i in range(1, 8)]
    for i, Li in enumerate(Ls):
        for j, Lj in enumerate(Ls):
            target = -2 * np.eye(8) if i == j else 0
            assert np.abs(Li @ Lj + Lj @ Li - target).max() < 1e-14


def test_generator_product_sign():
    s = O.generator_product_sign()
    P = np.linalg.multi_dot([O.right_mult_operator(e(i)) for i in range(1, 8)])
    assert s in (1, -1) and np.allclose(P, s * np.eye(8))


def test_cayley_plane_examples():
    q = O.cayley_plane_span(O.ONE, e(1), e(2))
    assert O.subspace_distance(q.basis, np.eye(8)[:4]) < 1e-12
    p = O.cayley_plane_span(O.ONE, e(1), e(4))
    assert O.subspace_distance(p.basis, np.eye(8)[[0, 1, 4, 5]]) < 1e-12
    ok, res = O.is_cayley_plane(np.eye(8)[[0, 1, 2, 4]])
    assert not ok and res >= 0.5
    ok, _ = O.is_cayley_plane(np.eye(8)[4:])
    assert ok


def test_random_plane_properties(rng):
    a = O.random_octonions(rng, 1)[0]
    u, v = np.linalg.qr(rng.standard_normal((7, 2)))[0].T
    u, v = np.r_[0, u], np.r_[0, v]
    P = O.cayley_plane_span(a, u, v)
    assert O.is_cayley_plane(P.basis)[0]
    assert O.random_closure_residual(P.basis, rng) < 1e-12  # basis triples suffice
    C = P.complement()
    assert O.is_cayley_plane(C.basis)[0]
    prod = O.cayley_product_space(P, rng)
    assert np.abs(projector(prod) - projector(O.cayley_product_space(C, rng))).max() < 1e-10


def test_product_space_examples(rng):
    q = O.CayleyPlane(np.eye(8)[:4])
    assert O.subspace_distance(O.cayley_product_space(q, rng), np.eye(8)[:4]) < 1e-12
    c = O.CayleyPlane(np.eye(8)[4:])
    assert O.subspace_distance(O.cayley_product_space(c, rng), np.eye(8)[:4]) < 1e-12


def test_degenerate_span():
    with pytest.raises(ValueError):
        O.cayley_plane_span(O.ONE, e(1), e(1))
