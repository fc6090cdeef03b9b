"""Named verification suites; ``run_all`` is the acceptance runner behind ``verify all``.

Every suite draws from its own generator seeded by ``(seed, suite index)``,
so suites are independent of execution order and of each other.
"""

from __future__ import annotations

import math
import os

import numpy as np

from . import clifford, conformal, curvature, geodiff, jsonio, octonion
from .numkit import DEFAULT_POLICY, TolerancePolicy, jacobi_eigh, random_orthogonal, random_symmetric, random_unit
from .parallel import ENV_VAR

OSSERMAN_GRID = [(2, 1), (4, 1), (4, 3), (6, 1)] + [(8, k) for k in range(1, 8)] + [(12, 3), (16, 4)]
OSSERMAN_DEV_TOL = 1e-10
OCT_TRIALS = 10_000
OCT_TOL = 1e-12
EXTENSION_NUS = (1, 2, 4, 5, 6)
EXTENSION_TOL = 1e-11
WEYL_DRAWS = 50
WEYL_TOL = 1e-10
NORM_REL_TOL = 1e-9
THETA_SAMPLES = 100
THETA_TOL = 1e-10
CODAZZI_GRID = [(6, 1), (8, 3), (12, 3)]
CODAZZI_DRAWS = 200
CODAZZI_MIN = 1e-3
MODEL_PAIRS = [(1, 4), (1, 6), (1, 8), (3, 8), (3, 12)]


def _rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def _nonzero(rng, size, low=0.5, high=2.0):
    return rng.uniform(low, high, size) * rng.choice([-1.0, 1.0], size)


# -- 1 ---------------------------------------------------------------------


def clifford_osserman(seed: int, policy: TolerancePolicy = DEFAULT_POLICY, grid=None) -> dict:
    rng = _rng(seed, 1)
    rows = []
    for n, nu in grid or OSSERMAN_GRID:
        lambda0 = float(rng.uniform(-2, 2))
        eta = tuple(_nonzero(rng, nu))
        sys = clifford.generate(n, nu, lambda0, eta, seed=int(rng.integers(2**32)))
        R = curvature.from_clifford(sys)
        rep = curvature.osserman_check(R, samples=200, policy=policy, seed=int(rng.integers(2**32)))
        predicted = curvature.predicted_spectrum(sys, policy.cluster_tol)
        spectrum_ok = rep.reference_spectrum.matches(predicted, 1e-9)
        rows.append({
            "n": n, "nu": nu,
            "deviation": rep.max_spectrum_deviation,
            "samples": rep.samples_used,
            "spectrum": rep.reference_spectrum.to_dict()["clusters"],
            "predicted": [list(c) for c in predicted],
            "pass": rep.max_spectrum_deviation < OSSERMAN_DEV_TOL and spectrum_ok,
        })
    return {"cases": rows, "pass": all(r["pass"] for r in rows)}


# -- 2 ---------------------------------------------------------------------


def radon_nvsnu(seed: int = 0, max_n: int = 512) -> dict:
    scan = clifford.nvsnu_scan(max_n)
    equality_ok = set(scan["equality_i"]) == clifford.EQUALITY_EXPECTED
    exceptions_ok = set(scan["exceptions_ii"]) == clifford.EXCEPTIONS_EXPECTED
    zero_violations = not scan["violations_i"] and not scan["violations_iii"]
    return {
        "max_n": max_n,
        "pairs_scanned": scan["pairs_checked"],
        "violations_i": scan["violations_i"],
        "violations_iii": scan["violations_iii"],
        "equality_i": sorted(scan["equality_i"]),
        "equality_expected": sorted(clifford.EQUALITY_EXPECTED),
        "exceptions_ii": sorted(scan["exceptions_ii"]),
        "exceptions_expected": sorted(clifford.EXCEPTIONS_EXPECTED),
        "pass": zero_violations and equality_ok and exceptions_ok,
    }


# -- 3 ---------------------------------------------------------------------


def octonion_suite(seed: int, trials: int = OCT_TRIALS) -> dict:
    rng = _rng(seed, 3)
    real = octonion.identity_residuals(*(octonion.random_octonions(rng, trials) for _ in range(3)))
    real.update(octonion.inverse_residuals(octonion.random_octonions(rng, trials)))
    bi = octonion.identity_residuals(*(octonion.random_bioctonions(rng, trials) for _ in range(3)))
    a, b = octonion.zero_divisor_pair()
    zd = octonion.hermitian_norm(octonion.mul(a, b))
    sign = octonion.generator_product_sign()
    fixed, original = clifford.normalize_product_sign(clifford.octonionic(7))
    fixed_sign = 1 if np.allclose(np.linalg.multi_dot(fixed.J), np.eye(8), atol=1e-12) else 0
    worst = max(max(real.values()), max(bi.values()))
    return {
        "trials": trials,
        "real": real,
        "bioctonion": bi,
        "worst": worst,
        "zero_divisor_product": zd,
        "zero_divisor_factors_norm": [octonion.hermitian_norm(a), octonion.hermitian_norm(b)],
        "generator_product_sign": sign,
        "sign_after_flip": fixed_sign,
        "pass": worst < OCT_TOL and zd < 1e-15 and sign in (1, -1) and original == sign and fixed_sign == 1,
    }


# -- 4 ---------------------------------------------------------------------


def _admissible_xis(rng, eta, count=3):
    out = []
    while len(out) < count:
        xi = float(_nonzero(rng, 1)[0])
        if all(abs(xi + e) > 0.1 for e in eta) and all(abs(xi - o) > 0.1 for o in out):
            out.append(xi)
    return out


def r8_extension(seed: int, policy: TolerancePolicy = DEFAULT_POLICY) -> dict:
    rng = _rng(seed, 4)
    rows = []
    for nu in EXTENSION_NUS:
        Q = random_orthogonal(rng, 8)
        sys = clifford.octonionic(nu, float(rng.uniform(-2, 2)), tuple(_nonzero(rng, nu))).conjugated(Q)
        R0 = curvature.from_clifford(sys)
        cls = clifford.classify_r8(sys, policy)
        for xi in _admissible_xis(rng, sys.eta):
            try:
                ext = clifford.extend_to_seven(sys, xi, rng, policy)
            except clifford.ExtensionError as exc:
                rows.append({"nu": nu, "xi": xi, "class": cls, "error": str(exc), "pass": False})
                continue
            dist = R0.distance(curvature.from_clifford(ext))
            kept = all(np.array_equal(a, b) for a, b in zip(sys.J, ext.J))
            valid = clifford.validate(ext, policy)["pass"]
            rows.append({
                "nu": nu, "xi": xi, "class": cls, "curvature_distance": dist,
                "prefix_kept": kept, "valid": valid,
                "pass": cls is clifford.R8Class.EXTENDABLE and ext.nu == 7 and dist < EXTENSION_TOL and kept and valid,
            })
    quat = clifford.quaternionic_block(8, 1.0, tuple(_nonzero(rng, 3))).conjugated(random_orthogonal(rng, 8))
    qcls = clifford.classify_r8(quat, policy)
    try:
        clifford.extend_to_seven(quat, 1.0, rng, policy)
        refused = False
    except clifford.ExtensionError:
        refused = True
    quat_row = {"class": qcls, "refused": refused,
                "pass": qcls is clifford.R8Class.CLIFF3_SPECIAL and refused}
    return {"extensions": rows, "quaternionic": quat_row,
            "pass": all(r["pass"] for r in rows) and quat_row["pass"]}


# -- 5 ---------------------------------------------------------------------


def _random_model_data(rng, nu, n, eps) -> conformal.ConformalData:
    sys = curvature.model_system(nu, eps, n).conjugated(random_orthogonal(rng, n))
    phi = float(rng.uniform(-1, 1))
    return conformal.ConformalData.from_phi(phi, rng.standard_normal(n), random_symmetric(rng, n), eps, sys)


def conformal_block(nu: int, n: int, eps: int, seed: int, draws: int = 10, samples: int = 20) -> dict:
    """Residuals of every conformal identity for one (nu, n, eps)."""
    rng = np.random.default_rng([seed, 50, nu, n, eps + 1])
    weyl_dev = norm_err = theta = antisym = cons = trace = ricci_pat = 0.0
    C = conformal.c_const(nu, n)
    for _ in range(draws):
        data = _random_model_data(rng, nu, n, eps)
        K = conformal.k_from_phi(data.phi_grad, data.phi_hess)
        R = conformal.conformal_curvature(data, K)
        Wm = conformal.model_weyl(nu, eps, data.f, data.sys)
        weyl_dev = max(weyl_dev, curvature.weyl(R).distance(Wm))
        norm_err = max(norm_err, abs(conformal.weyl_norm_sq(Wm) / data.f**2 - C) / C)
        cons = max(cons, data.consistency_residual())
        lap = np.trace(data.phi_hess) + (n / 2 - 1) * float(data.phi_grad @ data.phi_grad)
        trace = max(trace, abs(np.trace(K) - lap))
        model_part = conformal.conformal_curvature(data, np.zeros((n, n)))
        dRic = curvature.ricci(R) - curvature.ricci(model_part)
        ricci_pat = max(ricci_pat, float(np.abs(dRic - ((n - 2) * K + np.trace(K) * np.eye(n))).max()))
        D = conformal.weyl_cov_deriv(data, rng.standard_normal(n))
        antisym = max(antisym, float(np.abs(D + D.transpose(1, 0, 2, 3)).max()),
                      float(np.abs(D + D.transpose(0, 1, 3, 2)).max()))
    for _ in range(samples):
        data = _random_model_data(rng, nu, n, eps)
        Z = rng.standard_normal(n)
        Z /= np.linalg.norm(Z)
        Y = conformal.orthogonal_to_orbit(data.sys, Z, rng)
        theta = max(theta, abs(conformal.weyl_divergence(data, Y, Z) - conformal.divergence_closed_form(data, Z)))
    return {
        "weyl_vs_model": weyl_dev,
        "norm_constant_rel_error": norm_err,
        "theta_identity": theta,
        "cov_deriv_antisymmetry": antisym,
        "gradient_consistency": cons,
        "trace_k_identity": trace,
        "ricci_k_pattern": ricci_pat,
    }


def conformal_suite(seed: int) -> dict:
    rng = _rng(seed, 5)
    combos = [(nu, n, eps) for nu, n in MODEL_PAIRS for eps in (1, -1)]
    weyl_dev = norm_err = theta = 0.0
    for k in range(WEYL_DRAWS):
        nu, n, eps = combos[k % len(combos)]
        data = _random_model_data(rng, nu, n, eps)
        K = random_symmetric(rng, n)
        W = curvature.weyl(conformal.conformal_curvature(data, K))
        Wm = conformal.model_weyl(nu, eps, data.f, data.sys)
        weyl_dev = max(weyl_dev, W.distance(Wm))
        C = conformal.c_const(nu, n)
        norm_err = max(norm_err, abs(conformal.weyl_norm_sq(Wm) / data.f**2 - C) / C)
    for k in range(THETA_SAMPLES):
        nu, n, eps = combos[k % len(combos)]
        data = _random_model_data(rng, nu, n, eps)
        Z = rng.standard_normal(n)
        Z /= np.linalg.norm(Z)
        Y = conformal.orthogonal_to_orbit(data.sys, Z, rng)
        theta = max(theta, abs(conformal.weyl_divergence(data, Y, Z) - conformal.divergence_closed_form(data, Z)))
    constants = {"C_1_6": conformal.c_const(1, 6), "C_3_8": conformal.c_const(3, 8)}
    constants_ok = math.isclose(constants["C_1_6"], 230.4, rel_tol=1e-12) and math.isclose(
        constants["C_3_8"], 5760 / 7, rel_tol=1e-12)
    return {
        "weyl_draws": WEYL_DRAWS, "weyl_vs_model": weyl_dev,
        "norm_constant_rel_error": norm_err, "constants": constants,
        "theta_samples": THETA_SAMPLES, "theta_identity": theta,
        "pass": weyl_dev < WEYL_TOL and norm_err < NORM_REL_TOL and constants_ok and theta < THETA_TOL,
    }


# -- 6 ---------------------------------------------------------------------


def random_nonscalar_rho(rng, n: int, k: int) -> np.ndarray:
    """Even k: generic symmetric; odd k: 2 or 3 eigenvalues with random multiplicities."""
    if k % 2 == 0:
        return random_symmetric(rng, n)
    parts = int(rng.integers(2, 4))
    cuts = np.sort(rng.choice(np.arange(1, n), parts - 1, replace=False))
    sizes = np.diff(np.concatenate([[0], cuts, [n]]))
    values = np.repeat(rng.permutation(np.arange(parts)) + rng.uniform(-0.5, 0.5), sizes)
    Q = random_orthogonal(rng, n)
    return Q @ np.diag(values) @ Q.T


def codazzi_suite(seed: int, draws: int = CODAZZI_DRAWS) -> dict:
    rng = _rng(seed, 6)
    rows = []
    for n, nu in CODAZZI_GRID:
        sys = clifford.generate(n, nu, 1.0, tuple(_nonzero(rng, nu)), seed=int(rng.integers(2**32)))
        res = [conformal.codazzi_residual(random_nonscalar_rho(rng, n, k), sys, seed=k) for k in range(draws)]
        scal = [conformal.codazzi_residual(float(c) * np.eye(n), sys) for c in rng.uniform(-3, 3, 20)]
        rows.append({
            "n": n, "nu": nu, "draws": draws,
            "min_nonscalar_residual": min(res), "max_scalar_residual": max(scal),
            "pass": min(res) > CODAZZI_MIN and max(scal) == 0.0,
        })
    return {"cases": rows, "pass": all(r["pass"] for r in rows)}


def codazzi_exploration(seed: int, draws: int = 6) -> dict:
    """Report-only scan at the exceptional (n, nu) pairs; asserts nothing."""
    rng = _rng(seed, 60)
    out = {}
    for n, nu in [(24, 7), (32, 8), (32, 9)]:
        sys = clifford.generate(n, nu, 1.0, tuple(_nonzero(rng, nu)), seed=int(rng.integers(2**32)))
        res = [conformal.codazzi_residual(random_nonscalar_rho(rng, n, 2 * k + 1), sys, samples=4, seed=k)
               for k in range(draws)]
        out[f"{n}_{nu}"] = {"min_residual": min(res), "max_residual": max(res), "draws": draws}
    return out


# -- 7 ---------------------------------------------------------------------


def _order(residuals) -> float:
    return min(math.log2(a / b) for a, b in zip(residuals, residuals[1:]))


def geodiff_suite(seed: int, policy: TolerancePolicy = DEFAULT_POLICY) -> dict:
    rng = _rng(seed, 7)
    cfg = geodiff.FDConfig(1e-3)
    out = {}
    sphere_dev = 0.0
    for n in (4, 5, 6):
        ch = geodiff.sphere(n)
        for x in ch.sample_points(3, rng):
            R = geodiff.riemann_at(ch, x, cfg)
            sphere_dev = max(sphere_dev, R.distance(curvature.from_clifford(clifford.generate(n, 0, 1.0))))
    out["sphere_vs_constant_curvature"] = sphere_dev

    cp = geodiff.complex_projective(2)
    target = np.array([0.0, 1.0, 1.0, 4.0])
    scan = geodiff.osserman_scan(cp, cp.sample_points(5, rng), 20, cfg, policy,
                                 seed=int(rng.integers(2**32)), homogeneous=True)
    cp_dev = 0.0
    for x in scan["points"]:
        R = geodiff.riemann_at(cp, np.array(x["point"]), cfg)
        w, _ = jacobi_eigh(curvature.jacobi_batch(R, random_unit(rng, 4, 20)))
        cp_dev = max(cp_dev, float(np.abs(w - target).max()))
    out["cp2_spectrum_deviation"] = cp_dev
    out["cp2_cross_point_deviation"] = scan["cross_point_deviation_R"]

    flat = 0.0
    for n in (4, 5, 6):
        ch = geodiff.conformally_flat(geodiff.Poly.random_quadratic(n, rng), analytic=False)
        for x in ch.sample_points(2, rng, 0.05):
            flat = max(flat, math.sqrt(conformal.weyl_norm_sq(curvature.weyl(geodiff.riemann_at(ch, x, cfg)))))
    out["conformally_flat_weyl_norm"] = flat
    sph = geodiff.conformal(geodiff.sphere(4), geodiff.Poly.random_quadratic(4, rng, 0.2), analytic=False)
    out["conformal_sphere_weyl_norm"] = math.sqrt(conformal.weyl_norm_sq(
        curvature.weyl(geodiff.riemann_at(sph, sph.sample_points(1, rng, 0.1)[0], cfg))))

    hs = [0.02, 0.01, 0.005]
    x = cp.sample_points(1, rng, 0.2)[0]
    b2 = [geodiff.bianchi2_residual(cp, x, geodiff.FDConfig(h)) for h in hs]
    out["bianchi2_steps"] = hs
    out["bianchi2_residuals"] = b2
    out["bianchi2_order"] = _order(b2)

    lap = 0.0
    lap_cfg = geodiff.FDConfig(1e-3, richardson=True)
    for n in (5, 6, 8):
        phi = geodiff.Poly.random_quadratic(n, rng)
        for x in rng.uniform(-0.3, 0.3, (3, n)):
            lap = max(lap, geodiff.laplacian_identity_residual(phi, x, lap_cfg))
    out["laplacian_identity"] = lap
    lin = geodiff.Poly.linear(rng.standard_normal(6))
    out["laplacian_identity_linear_analytic"] = geodiff.laplacian_identity_residual(lin, rng.uniform(-1, 1, 6),
                                                                                   analytic=True)
    out["pass"] = (sphere_dev < 1e-5 and cp_dev < 1e-4 and flat < 1e-4
                   and out["conformal_sphere_weyl_norm"] < policy.fd_tol
                   and out["bianchi2_order"] >= 1.8 and lap < 1e-6
                   and out["laplacian_identity_linear_analytic"] < 1e-8)
    return out


# -- 8 ---------------------------------------------------------------------


def determinism_probe(seed: int, thread_counts=(1, 4)) -> dict:
    """Re-run a parallel suite under different thread caps and compare serialized bytes."""
    grid = [(8, 7), (16, 4)]
    old = os.environ.get(ENV_VAR)
    texts = []
    try:
        for k in thread_counts:
            os.environ[ENV_VAR] = str(k)
            texts.append(jsonio.dumps(clifford_osserman(seed, grid=grid)))
    finally:
        if old is None:
            os.environ.pop(ENV_VAR, None)
        else:
            os.environ[ENV_VAR] = old
    return {"thread_counts": list(thread_counts), "identical": len(set(texts)) == 1,
            "pass": len(set(texts)) == 1}


SUITES = {
    "1_clifford_osserman": lambda s, p: clifford_osserman(s, p),
    "2_radon_nvsnu": lambda s, p: radon_nvsnu(s),
    "3_octonion_identities": lambda s, p: octonion_suite(s),
    "4_r8_extension": lambda s, p: r8_extension(s, p),
    "5_weyl_conformal": lambda s, p: conformal_suite(s),
    "6_codazzi_rigidity": lambda s, p: codazzi_suite(s),
    "7_geodiff_crosscheck": lambda s, p: geodiff_suite(s, p),
    "8_determinism_probe": lambda s, p: determinism_probe(s),
}


def run_all(seed: int = 0, policy: TolerancePolicy = DEFAULT_POLICY, only=None) -> dict:
    checks = {name: fn(seed, policy) for name, fn in SUITES.items() if only is None or name in only}
    report = {
        "seed": seed,
        "policy": policy.to_dict(),
        "checks": checks,
        "summary": {name: bool(c["pass"]) for name, c in checks.items()},
        "pass": all(c["pass"] for c in checks.values()),
    }
    if only is None:
        report["exploration"] = {"codazzi_exceptional_pairs": codazzi_exploration(seed)}
    return report

