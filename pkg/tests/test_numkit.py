import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from osserman_lab.numkit import (
    ConvergenceError, Spectrum, TolerancePolicy, cluster, eigenspaces, jacobi_eigh, null_space,
    random_symmetric, random_unit, sqrt_inv_psd, sym, sym_eig, wedge,
)


def test_identity_spectrum():
    assert sym_eig(np.eye(4)).clusters == ((1.0, 4),)


def test_diagonal_clusters():
    s = sym_eig(np.diag([0.0, 1.0, 1.0, 4.0]))
    assert s.clusters == ((0.0, 1), (1.0, 2), (4.0, 1))
    assert s.n == 4 and s.matches([(4, 1), (1, 2), (0, 1)], 1e-12)


def test_charpoly_oracle():
    # exact rational matrix; roots of the determinant expansion by sympy
    rng = np.random.default_rng(3)
    Mi = rng.integers(-5, 6, (6, 6))
    Mi = Mi + Mi.T
    lam = sympy.symbols("lam")
    p = sympy.Matrix(Mi.tolist()).charpoly(lam)
    roots = sorted(float(sympy.re(r)) for r in sympy.Poly(p, lam).nroots(n=30))
    w, _ = jacobi_eigh(Mi.astype(float))
    assert np.allclose(w, roots, atol=1e-9)


def test_eigenvectors_reconstruct(rng):
    M = random_symmetric(rng, 12)
    w, V = jacobi_eigh(M)
    assert np.abs(V @ np.diag(w) @ V.T - M).max() < 1e-12 * np.abs(M).max() * 12
    assert np.abs(V.T @ V - np.eye(12)).max() < 1e-13


def test_batch_matches_single(rng):
    Ms = np.array([random_symmetric(rng, 7) for _ in range(5)])
    wb, _ = jacobi_eigh(Ms)
    for M, w in zip(Ms, wb):
        assert np.array_equal(jacobi_eigh(M)[0], w)


def test_degenerate_and_zero():
    w, V = jacobi_eigh(np.zeros((5, 5)))
    assert np.all(w == 0) and np.allclose(V, np.eye(5))
    Q, _ = np.linalg.qr(np.random.default_rng(1).standard_normal((6, 6)))
    M = Q @ np.diag([2.0, 2, 2, -1, -1, 5]) @ Q.T
    assert sym_eig(M).clusters[0][1] == 2 and sym_eig(M).clusters[1][1] == 3


def test_huge_dimension_rejected():
    with pytest.raises(ValueError):
        jacobi_eigh(np.eye(33))


def test_cluster_single_linkage():
    (c0, m0), (c1, m1) = cluster([0.0, 1e-8, 2e-8, 1.0], 1.5e-8)
    assert (m0, m1) == (3, 1) and c0 == pytest.approx(1e-8) and c1 == 1.0
    assert cluster([0.0, 1.0], 1e-7) == ((0.0, 1), (1.0, 1))


def test_wedge_basics(rng):
    e = np.eye(4)
    assert np.allclose(wedge(e[0], e[1]) @ e[0], e[1])
    X = rng.standard_normal(4)
    assert np.all(wedge(X, X) == 0)
    for _ in range(100):
        X, Y = rng.standard_normal((2, 5))
        assert np.abs(wedge(X, Y) + wedge(Y, X)).max() < 1e-14


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, (6, 6), elements=st.floats(-10, 10)))
def test_trace_and_realness(A):
    M = sym(A)
    s = sym_eig(M, TolerancePolicy(cluster_tol=1e-9))
    total = sum(v * m for v, m in s.clusters)
    assert abs(total - np.trace(M)) <= 1e-10 * max(1.0, np.abs(M).sum())
    assert np.allclose(s.values, np.linalg.eigvalsh(M), atol=1e-10 * max(1.0, np.abs(M).max()))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 9), st.integers(0, 2**31))
def test_wedge_is_skew(n, seed):
    r = np.random.default_rng(seed)
    X, Y, U, V = r.standard_normal((4, n))
    W = wedge(X, Y)
    assert abs(U @ W @ V + V @ W @ U) < 1e-12 * (1 + np.abs(W).max())


def test_policy_validation():
    with pytest.raises(ValueError):
        TolerancePolicy(cluster_tol=0.0)
    assert TolerancePolicy().with_cluster_tol(1e-3).cluster_tol == 1e-3


def test_helpers(rng):
    X = random_unit(rng, 5, 10)
    assert np.allclose(np.linalg.norm(X, axis=1), 1)
    S = random_symmetric(rng, 4)
    P = S @ S.T + np.eye(4)
    R = sqrt_inv_psd(P)
    assert np.allclose(R @ P @ R, np.eye(4))
    A = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    N = null_space(A)
    assert N.shape == (3, 1) and np.allclose(A @ N, 0)
    spaces = eigenspaces(np.diag([1.0, 1, 2]), 1e-7)
    assert [E.shape[1] for E in spaces] == [2, 1]


def test_spectrum_to_dict():
    d = Spectrum(((0.0, 1), (1.0, 2)), 1e-7).to_dict()
    assert d == {"clusters": [[0.0, 1], [1.0, 2]], "cluster_tol": 1e-7}


def test_convergence_error_is_runtime():
    assert issubclass(ConvergenceError, RuntimeError)
