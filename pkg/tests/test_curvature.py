import numpy as np
import pytest

from osserman_lab import clifford as C
from osserman_lab import curvature as K
from osserman_lab.numkit import TolerancePolicy, random_symmetric, random_unit, sym_eig


def test_sphere_tensor():
    R = K.from_clifford(C.generate(4, 0, 1.0))
    I = np.eye(4)
    assert np.array_equal(R.R, np.einsum("ik,jl->ijkl", I, I) - np.einsum("il,jk->ijkl", I, I))


@pytest.mark.parametrize("n,nu", [(6, 1), (8, 3), (8, 7), (16, 8)])
def test_symmetries(n, nu, rng):
    s = C.generate(n, nu, rng.uniform(-1, 1), tuple(rng.uniform(0.5, 2, nu)), seed=1)
    raw = K.constant_curvature_array(n, s.lambda0) + K.clifford_part_array(s.stack, s.eta)
    assert max(K.symmetry_residuals(raw).values()) < 1e-12


def test_spectra_examples(rng):
    X = random_unit(rng, 6)
    R = K.from_clifford(C.generate(6, 1, 1.0, (1.0,)))
    assert sym_eig(K.jacobi(R, X)).matches([(0, 1), (1, 4), (4, 1)], 1e-10)
    R = K.from_clifford(C.generate(8, 3, 1.0, (1.0,) * 3))
    assert sym_eig(K.jacobi(R, random_unit(rng, 8))).matches([(0, 1), (1, 4), (4, 3)], 1e-10)
    R = K.model_tensor(1, -1, 6)
    assert sym_eig(K.jacobi(R, random_unit(rng, 6))).matches([(-4, 1), (-1, 4), (0, 1)], 1e-10)


def test_jacobi_closed_form(rng):
    s = C.generate(8, 3, 0.3, (1.0, -0.5, 2.0), seed=4)
    R = K.from_clifford(s)
    X = random_unit(rng, 8)
    expected = s.lambda0 * (np.eye(8) - np.outer(X, X))
    for J, eta in zip(s.J, s.eta):
        expected += 3 * eta * np.outer(J @ X, J @ X)
    assert np.abs(K.jacobi(R, X) - expected).max() < 1e-13
    assert np.abs(K.jacobi(R, X) @ X).max() < 1e-13
    assert np.allclose(K.jacobi(R, 2 * X), 4 * K.jacobi(R, X))


def test_model_sectional_curvatures(rng):
    R = K.model_tensor(1, 1, 4)
    for i in range(4):
        for j in range(i + 1, 4):
            k = R.R[i, j, i, j]
            assert 1 - 1e-12 <= k <= 4 + 1e-12
    for X, Y in random_unit(rng, 4, 40).reshape(20, 2, 4):
        Y = Y - (Y @ X) * X
        Y /= np.linalg.norm(Y)
        assert 1 - 1e-12 <= np.einsum("ijkl,i,j,k,l->", R.R, X, Y, X, Y) <= 4 + 1e-12


def test_model_einstein():
    Ric = K.ricci(K.model_tensor(3, 1, 8))
    assert np.abs(Ric - Ric[0, 0] * np.eye(8)).max() < 1e-12


def test_ricci_of_clifford(rng):
    s = C.generate(12, 3, 0.4, (1.0, -2.0, 0.5), seed=9)
    Ric = K.ricci(K.from_clifford(s))
    assert np.allclose(Ric, ((12 - 1) * 0.4 + 3 * sum(s.eta)) * np.eye(12), atol=1e-12)


def test_confcs_reduces_to_clifford():
    s = C.generate(6, 1, 1.4, (0.7,), seed=2)
    assert K.from_confcs(0.7 * np.eye(6), s).distance(K.from_clifford(s)) < 1e-15


def test_confcs_weyl_independent_of_rho(rng):
    s = C.generate(8, 3, 0.0, (1.0, 2.0, -1.0), seed=3)
    W0 = K.weyl(K.from_confcs(np.zeros((8, 8)), s))
    for _ in range(10):
        assert K.weyl(K.from_confcs(random_symmetric(rng, 8), s)).distance(W0) < 1e-10
    assert np.abs(K.weyl(K.from_confcs(np.diag([1.0] * 3 + [2.0] * 3), C.generate(6, 0))).R).max() < 1e-12


def test_weyl_properties(rng):
    R = K.CurvTensor(rng.standard_normal((7, 7, 7, 7)))
    W = K.weyl(R)
    assert np.abs(K.ricci(W)).max() < 1e-10
    assert K.weyl(W).distance(W) < 1e-12
    assert max(K.symmetry_residuals(W.R).values()) < 1e-12
    assert np.abs(K.weyl(K.constant_curvature(5, 2.0)).R).max() < 1e-14
    with pytest.raises(ValueError):
        K.weyl(K.constant_curvature(3))


def test_kulkarni_nomizu_ricci(rng):
    S = random_symmetric(rng, 6)
    Ric = K.ricci(K.CurvTensor(K.kulkarni_nomizu_identity(S)))
    assert np.allclose(Ric, 4 * S + np.trace(S) * np.eye(6))


def test_recover_rho(rng):
    s = C.generate(6, 1, 0.0, (1.3,), seed=5)
    rho = random_symmetric(rng, 6)
    R = K.from_confcs(rho, s)
    # with the Ricci-flat lambda0 the recovery is exact
    back = K.recover_rho(R, K.weyl_lambda0(s))
    assert np.abs(back - rho).max() < 1e-12
    # lambda0 = 0 shifts by a multiple of the identity
    shifted = K.recover_rho(R, 0.0)
    gauge = shifted - rho
    assert np.abs(gauge - gauge[0, 0] * np.eye(6)).max() < 1e-12
    assert gauge[0, 0] == pytest.approx(3 * 1.3 / (2 * 5))
    assert K.from_confcs(back, s).distance(R) < 1e-9
    d = np.diag(rng.uniform(-1, 1, 5))
    assert np.abs(K.recover_rho(K.from_confcs(d, C.generate(5, 0)), 0.0) - d).max() < 1e-12
    # constant curvature as confcs data with nu = 0: the eta-gauge is weyl_lambda0 = 0
    assert K.weyl_lambda0(C.generate(5, 0)) == 0
    assert np.allclose(K.recover_rho(K.constant_curvature(5, 0.8), 0.0), 0.4 * np.eye(5))


GRID = [(2, 1), (4, 1), (4, 3), (6, 1), (8, 2), (8, 5), (12, 3), (16, 4)]


@pytest.mark.parametrize("n,nu", GRID)
def test_clifford_is_osserman(n, nu, rng):
    s = C.generate(n, nu, rng.uniform(-2, 2), tuple(rng.uniform(0.5, 2, nu)), seed=n + nu)
    rep = K.osserman_check(K.from_clifford(s), samples=max(n, 60))
    assert rep.is_osserman and rep.max_spectrum_deviation < 1e-10
    assert rep.reference_spectrum.matches(K.predicted_spectrum(s, 1e-7), 1e-9)


def test_perturbation_breaks_osserman(rng):
    s = C.generate(8, 3, 1.0, (1.0, 1.0, 1.0), seed=1)
    A = random_symmetric(rng, 8)
    A /= np.abs(A).max()
    R = K.from_clifford(s) + 0.1 * K.canonical_tensor(A)
    assert not K.osserman_check(R, 40).is_osserman
    e = np.eye(8)
    w0, w1 = np.linalg.eigvalsh(K.jacobi(R, e[0])), np.linalg.eigvalsh(K.jacobi(R, e[1]))
    assert np.abs(w0 - w1).max() > 1e-3


def test_zero_tensor_osserman():
    rep = K.osserman_check(K.CurvTensor(np.zeros((5,) * 4)), 10)
    assert rep.is_osserman and rep.reference_spectrum.clusters == ((0.0, 5),)


def test_weyl_of_models_is_osserman():
    for nu, eps, n in [(1, 1, 6), (3, -1, 8)]:
        W = K.weyl(K.model_tensor(nu, eps, n))
        assert K.osserman_check(W, 60, TolerancePolicy(cluster_tol=1e-9)).is_osserman


def test_thread_count_independent(monkeypatch):
    R = K.from_clifford(C.generate(16, 4, seed=3))
    out = []
    for k in ("1", "3"):
        monkeypatch.setenv("OSSERMAN_LAB_THREADS", k)
        out.append(K.osserman_check(R, 300, seed=4).max_spectrum_deviation)
    assert out[0] == out[1]


def test_json_roundtrip():
    R = K.from_clifford(C.generate(4, 1, seed=1))
    d = R.to_dict()
    assert set(d) == {"n", "R", "system"}
    assert np.array_equal(K.CurvTensor.from_dict(d).R, R.R)
    with pytest.raises(ValueError):
        K.CurvTensor.from_dict({"n": 3, "R": [0.0] * 10})


def test_samples_precondition():
    with pytest.raises(ValueError):
        K.osserman_check(K.constant_curvature(6), samples=3)
