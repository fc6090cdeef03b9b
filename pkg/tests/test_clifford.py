import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from osserman_lab import clifford as C
from osserman_lab import curvature as K
from osserman_lab.numkit import random_orthogonal


@pytest.mark.parametrize("n,nu", [(8, 7), (16, 8), (1, 0), (3, 0), (6, 1), (12, 3), (24, 7), (32, 9), (64, 11)])
def test_radon_bound(n, nu):
    assert C.radon_bound(n) == nu


def test_radon_bound_bruteforce():
    # independent oracle: the tabulated values rho(2^k) - 1 for k = 0..8
    table = {1: 0, 2: 1, 4: 3, 8: 7, 16: 8, 32: 9, 64: 11, 128: 15, 256: 16}
    for d, v in table.items():
        for c in (1, 3, 5):
            assert C.radon_bound(d * c) == v


@pytest.mark.parametrize("nu,d", [(1, 2), (2, 4), (3, 4), (7, 8), (8, 16), (9, 32)])
def test_min_module_dim(nu, d):
    assert C.min_module_dim(nu) == d
    assert C.radon_bound(d) >= nu and all(C.radon_bound(k) < nu for k in range(1, d))


def test_generate_rotation():
    s = C.generate(2, 1)
    assert np.array_equal(s.J[0], [[0.0, -1.0], [1.0, 0.0]])


def test_generate_octonionic_and_quaternionic():
    s = C.generate(8, 7)
    assert all(np.allclose(j, C.octonionic(7).J[i]) for i, j in enumerate(s.J))
    q = C.generate(4, 3)
    assert np.abs(q.J[0] @ q.J[1] - q.J[2]).max() < 1e-14


GRID = [(n, nu) for n in (2, 4, 6, 8, 12, 16, 24, 32) for nu in range(0, C.radon_bound(n) + 1)
        if n % C.min_module_dim(nu) == 0]


@pytest.mark.parametrize("n,nu", GRID)
def test_generate_validates(n, nu):
    rep = C.validate(C.generate(n, nu, seed=n * 31 + nu))
    assert rep["pass"] and max(rep["residuals"].values()) < 1e-13


def test_generate_errors():
    with pytest.raises(C.HurwitzError):
        C.generate(6, 2)
    with pytest.raises(C.HurwitzError):
        C.generate(12, 4)  # radon_bound(12) = 3
    with pytest.raises(ValueError):
        C.generate(4, 1, eta=(0.0,))


def test_generate_deterministic():
    a, b = C.generate(8, 3, seed=5), C.generate(8, 3, seed=5)
    assert all(np.array_equal(x, y) for x, y in zip(a.J, b.J))


def test_validate_detects_scaling():
    s = C.generate(4, 1)
    bad = C.CliffordSystem(4, (1.01 * s.J[0],), 1.0, (1.0,))
    rep = C.validate(bad)
    assert not rep["pass"] and "orthogonal" in rep["failures"]
    assert rep["residuals"]["orthogonal"] == pytest.approx(0.0201, rel=1e-6)
    assert C.validate(C.generate(4, 0))["pass"]


def test_json_roundtrip():
    s = C.generate(8, 3, 0.5, (1.0, -2.0, 3.0), seed=2)
    d = json.loads(json.dumps(s.to_dict()))
    assert set(d) == {"n", "nu", "lambda0", "eta", "J"} and len(d["J"][0]) == 64
    t = C.CliffordSystem.from_dict(d)
    assert all(np.array_equal(x, y) for x, y in zip(s.J, t.J)) and t.eta == s.eta
    with pytest.raises(ValueError):
        C.CliffordSystem.from_dict({"n": 4, "nu": 2, "J": [[0] * 16], "eta": [1, 1], "lambda0": 0})


def test_classify_r8():
    assert C.classify_r8(C.quaternionic_block()) is C.R8Class.CLIFF3_SPECIAL
    o3 = C.octonionic(3)
    assert np.linalg.norm(o3.J[0] @ o3.J[1] - o3.J[2]) > 1 and np.linalg.norm(o3.J[0] @ o3.J[1] + o3.J[2]) > 1
    assert C.classify_r8(o3) is C.R8Class.EXTENDABLE
    assert C.classify_r8(C.octonionic(7)) is C.R8Class.EXTENDABLE
    flipped = C.CliffordSystem(8, (C.quaternionic_block().J[0], C.quaternionic_block().J[1],
                                   -C.quaternionic_block().J[2]), 1.0, (1.0,) * 3)
    assert C.quaternionic_sign(flipped) == -1 and C.classify_r8(flipped) is C.R8Class.CLIFF3_SPECIAL


def test_extend_nu1_example():
    s = C.octonionic(1, 0.0, (1.0,))
    ext = C.extend_to_seven(s, 1.0)
    assert ext.lambda0 == -3.0 and ext.eta == (2.0,) + (1.0,) * 6
    assert K.from_clifford(s).distance(K.from_clifford(ext)) < 1e-11
    assert np.array_equal(ext.J[0], s.J[0])


def test_extend_identity_on_full():
    s = C.octonionic(7)
    assert C.extend_to_seven(s, 2.0) is s


@pytest.mark.parametrize("nu", [2, 3, 5, 6])
def test_extend_conjugated(nu, rng):
    s = C.octonionic(nu, 0.7, tuple(rng.uniform(0.5, 2, nu))).conjugated(random_orthogonal(rng, 8))
    R0 = K.from_clifford(s)
    for xi in (0.4, -1.7, 2.9):
        ext = C.extend_to_seven(s, xi, np.random.default_rng(1))
        assert C.validate(ext)["pass"]
        assert R0.distance(K.from_clifford(ext)) < 1e-11


def test_extend_errors():
    with pytest.raises(C.ExtensionError):
        C.extend_to_seven(C.quaternionic_block(), 1.0)
    with pytest.raises(ValueError):
        C.extend_to_seven(C.octonionic(2, eta=(1.0, 2.0)), -2.0)
    with pytest.raises(ValueError):
        C.extend_to_seven(C.octonionic(2), 0.0)


def test_normalize_product_sign():
    fixed, sign = C.normalize_product_sign(C.octonionic(7))
    assert sign in (1, -1)
    assert np.allclose(np.linalg.multi_dot(fixed.J), np.eye(8))
    assert K.from_clifford(fixed).distance(K.from_clifford(C.octonionic(7))) < 1e-14


def test_nvsnu_scan_small():
    rep = C.nvsnu_scan(64)
    assert rep["violations_i"] == [] and rep["violations_iii"] == []
    assert set(rep["equality_i"]) == {(6, 1), (12, 3), (24, 7)}
    assert (24, 7) in rep["exceptions_ii"]
    with pytest.raises(ValueError):
        C.nvsnu_scan(513)


def test_nvsnu_exceptions_bruteforce():
    # independent recount of n <= 4 nu - 2 over admissible (n, nu)
    found = {(n, nu) for n in range(1, 513) if n not in (2, 4, 8, 16)
             for nu in range(1, C.radon_bound(n) + 1) if n <= 4 * nu - 2}
    assert set(C.nvsnu_scan(512)["exceptions_ii"]) == found == {(24, 7), (32, 9)}


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 2048))
def test_radon_bound_matches_formula(n):
    k = (n & -n).bit_length() - 1
    a, b = divmod(k, 4)
    assert C.radon_bound(n) == 2**b + 8 * a - 1
