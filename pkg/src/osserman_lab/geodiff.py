"""Finite-difference Riemannian geometry on coordinate charts.

metric -> Christoffel symbols -> Riemann tensor -> Weyl tensor, with the
curvature expressed in the Gram-Schmidt orthonormalization of the
coordinate frame.  The sign convention matches ``curvature``: the unit
sphere chart yields ``constant_curvature(n, 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .curvature import CurvTensor, jacobi_batch, symmetry_residuals, weyl
from .numkit import Spectrum, TolerancePolicy, cluster, jacobi_eigh, random_unit


class ChartError(ValueError):
    pass


@dataclass(frozen=True)
class FDConfig:
    h: float = 1e-3
    richardson: bool = False
    scheme: str = "central"

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("step must be positive")
        if self.scheme != "central":
            raise ValueError("only central differences are supported")


# -- polynomials (for conformal factors) ----------------------------------


@dataclass(frozen=True)
class Poly:
    """Polynomial of degree <= 2 as ``[coef, i, j]`` terms, index -1 meaning "absent".

    ``[c, -1, -1]`` is a constant, ``[c, i, -1]`` is ``c x_i`` and
    ``[c, i, j]`` is ``c x_i x_j``.
    """

    dim: int
    terms: tuple[tuple[float, int, int], ...]

    def __post_init__(self):
        clean = []
        for t in self.terms:
            c, i, j = float(t[0]), int(t[1]), int(t[2])
            if not (-1 <= i < self.dim and -1 <= j < self.dim) or (i == -1 and j != -1):
                raise ValueError(f"bad monomial {t!r}")
            clean.append((c, i, j))
        object.__setattr__(self, "terms", tuple(clean))

    @classmethod
    def random_quadratic(cls, dim: int, rng: np.random.Generator, scale: float = 0.3) -> "Poly":
        terms = [(scale * rng.standard_normal(), -1, -1)]
        terms += [(scale * rng.standard_normal(), i, -1) for i in range(dim)]
        terms += [(scale * rng.standard_normal(), i, j) for i in range(dim) for j in range(i, dim)]
        return cls(dim, tuple(terms))

    @classmethod
    def linear(cls, a) -> "Poly":
        a = np.asarray(a, dtype=float)
        return cls(a.size, tuple((float(c), i, -1) for i, c in enumerate(a)))

    def value(self, x) -> float:
        x = np.asarray(x, dtype=float)
        total = 0.0
        for c, i, j in self.terms:
            total += c * (1.0 if i < 0 else x[i]) * (1.0 if j < 0 else x[j])
        return total

    def grad(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        g = np.zeros(self.dim)
        for c, i, j in self.terms:
            if i >= 0 and j < 0:
                g[i] += c
            elif i >= 0:
                g[i] += c * x[j]
                g[j] += c * x[i]
        return g

    def hess(self, x=None) -> np.ndarray:
        H = np.zeros((self.dim, self.dim))
        for c, i, j in self.terms:
            if j >= 0:
                H[i, j] += c
                H[j, i] += c
        return H

    def to_list(self) -> list:
        return [[c, i, j] for c, i, j in self.terms]


# -- charts ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MetricChart:
    name: str
    dim: int
    metric: Callable[[np.ndarray], np.ndarray]
    lower: np.ndarray
    upper: np.ndarray
    derivs: Callable | None = None  # x -> (g, dg, d2g), analytic
    params: dict = field(default_factory=dict)
    complex_structure: np.ndarray | None = None  # coordinate J, if the chart is Hermitian

    def g(self, x) -> np.ndarray:
        g = np.asarray(self.metric(np.asarray(x, dtype=float)), dtype=float)
        return 0.5 * (g + g.T)

    def check_interior(self, x, margin: float):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ChartError(f"point has shape {x.shape}, chart dimension is {self.dim}")
        if np.any(x - margin <= self.lower) or np.any(x + margin >= self.upper):
            raise ChartError("point is not interior to the chart domain (with stencil margin)")

    def sample_points(self, count: int, rng: np.random.Generator, shrink: float = 0.5) -> np.ndarray:
        mid = 0.5 * (self.lower + self.upper)
        half = 0.5 * (self.upper - self.lower) * shrink
        return mid + half * rng.uniform(-1, 1, (count, self.dim))

    def to_spec(self) -> dict:
        return {"name": self.name, "dim": self.dim, "params": dict(self.params)}


def _box(dim, r):
    return -r * np.ones(dim), r * np.ones(dim)


def euclidean(n: int) -> MetricChart:
    lo, hi = _box(n, 10.0)

    def derivs(x):
        return np.eye(n), np.zeros((n, n, n)), np.zeros((n, n, n, n))

    return MetricChart("euclidean", n, lambda x: np.eye(n), lo, hi, derivs, {})


def sphere(n: int) -> MetricChart:
    """Unit sphere in stereographic coordinates: g = 4 / (1 + |x|^2)^2 delta."""
    lo, hi = _box(n, 2.0)
    return MetricChart("sphere", n, lambda x: 4.0 / (1.0 + x @ x) ** 2 * np.eye(n), lo, hi, None, {})


def _complex_metric(m: int, sign: float, scale: float):
    def metric(x):
        z = x[:m] + 1j * x[m:]
        s = 1.0 + sign * np.vdot(z, z).real
        # h(u, v) = u^* H v with H = (s I - sign z z^*) / s^2; g = Re h
        H = (s * np.eye(m) - sign * np.outer(z, z.conj())) / s**2
        A, B = H.real, H.imag
        return scale * np.block([[A, -B], [B, A]])

    return metric


FS_SCALE = 1.0


def complex_projective(m: int = 2, sign: float = 1.0) -> MetricChart:
    """Fubini-Study (sign=+1) or complex hyperbolic (sign=-1) metric on C^m.

    Normalized so that sectional curvatures satisfy |K| in [1, 4].
    """
    if m not in (2, 3):
        raise ValueError("complex projective charts are provided for m in {2, 3}")
    dim = 2 * m
    lo, hi = _box(dim, 3.0 if sign > 0 else 0.9 / np.sqrt(dim))
    J0 = np.block([[np.zeros((m, m)), -np.eye(m)], [np.eye(m), np.zeros((m, m))]])
    name = "cp" if sign > 0 else "ch"
    return MetricChart(name, dim, _complex_metric(m, sign, FS_SCALE), lo, hi, None, {"m": m}, J0)


def conformal(base: MetricChart, phi: Poly, analytic: bool = True) -> MetricChart:
    """g = exp(2 phi) g_base; analytic derivatives when the base has them and ``analytic``."""
    if phi.dim != base.dim:
        raise ValueError("phi dimension does not match the base chart")

    def metric(x):
        return np.exp(2.0 * phi.value(x)) * base.g(x)

    derivs = None
    if analytic and base.derivs is not None:
        def derivs(x):
            g0, dg0, d2g0 = base.derivs(x)
            e = np.exp(2.0 * phi.value(x))
            p = 2.0 * phi.grad(x)
            P = 2.0 * phi.hess(x)
            g = e * g0
            dg = e * (p[:, None, None] * g0 + dg0)
            d2g = e * (
                (np.outer(p, p) + P)[:, :, None, None] * g0
                + p[:, None, None, None] * dg0[None]
                + p[None, :, None, None] * dg0[:, None]
                + d2g0
            )
            return g, dg, d2g

    name = "conformally_flat" if base.name == "euclidean" else f"conformal_{base.name}"
    params = {"phi": phi.to_list()}
    if base.name != "euclidean":
        params["base"] = base.to_spec()
    return MetricChart(name, base.dim, metric, base.lower, base.upper, derivs, params, base.complex_structure)


def conformally_flat(phi: Poly, analytic: bool = True) -> MetricChart:
    return conformal(euclidean(phi.dim), phi, analytic)


def chart_from_spec(spec: dict) -> MetricChart:
    """Build a chart from ``{"name", "dim", "params"}`` / ``{"phi": [...]}`` JSON."""
    try:
        name = spec.get("name", "conformally_flat" if "phi" in spec else None)
        params = dict(spec.get("params") or {})
        if "phi" in spec:
            params.setdefault("phi", spec["phi"])
        if name == "euclidean":
            return euclidean(int(spec["dim"]))
        if name == "sphere":
            return sphere(int(spec["dim"]))
        if name in ("cp", "ch"):
            m = int(params.get("m", int(spec.get("dim", 4)) // 2))
            return complex_projective(m, 1.0 if name == "cp" else -1.0)
        if name == "conformally_flat" or name.startswith("conformal"):
            base = chart_from_spec(params["base"]) if "base" in params else euclidean(int(spec["dim"]))
            phi = Poly(base.dim, tuple(tuple(t) for t in params["phi"]))
            return conformal(base, phi)
    except (KeyError, TypeError, ValueError) as exc:
        raise ChartError(f"malformed chart spec: {exc}") from exc
    raise ChartError(f"unknown chart {name!r}")


# -- derivatives -----------------------------------------------------------


def _fd_metric_derivs(chart: MetricChart, x: np.ndarray, h: float):
    n = chart.dim
    E = np.eye(n) * h
    g0 = chart.g(x)
    plus = [chart.g(x + E[k]) for k in range(n)]
    minus = [chart.g(x - E[k]) for k in range(n)]
    dg = np.array([(plus[k] - minus[k]) / (2 * h) for k in range(n)])
    d2g = np.zeros((n, n, n, n))
    for k in range(n):
        d2g[k, k] = (plus[k] - 2 * g0 + minus[k]) / h**2
        for m in range(k + 1, n):
            v = (chart.g(x + E[k] + E[m]) - chart.g(x + E[k] - E[m])
                 - chart.g(x - E[k] + E[m]) + chart.g(x - E[k] - E[m])) / (4 * h * h)
            d2g[k, m] = d2g[m, k] = v
    return g0, dg, d2g


def metric_derivs(chart: MetricChart, x, cfg: FDConfig = FDConfig()):
    """(g, dg, d2g) at x with dg[k] = d_k g and d2g[k, m] = d_k d_m g."""
    x = np.asarray(x, dtype=float)
    if chart.derivs is not None:
        return chart.derivs(x)
    g, dg, d2g = _fd_metric_derivs(chart, x, cfg.h)
    if cfg.richardson:
        _, dg2, d2g2 = _fd_metric_derivs(chart, x, cfg.h / 2)
        dg = (4 * dg2 - dg) / 3
        d2g = (4 * d2g2 - d2g) / 3
    return g, dg, d2g


def _check_pd(g):
    try:
        return np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise ChartError("metric is not positive definite at the stencil point") from exc


def _christoffel_parts(g, dg, d2g):
    L = _check_pd(g)
    ginv = np.linalg.inv(g)
    ginv = 0.5 * (ginv + ginv.T)
    # lower[l, i, j] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
    lower = 0.5 * (dg.transpose(2, 0, 1) + dg.transpose(2, 1, 0) - dg)
    Gamma = np.einsum("kl,lij->kij", ginv, lower)
    dlower = 0.5 * (
        np.einsum("mijl->mlij", d2g) + np.einsum("mjil->mlij", d2g) - d2g
    )
    dGamma = np.einsum("kl,mlij->mkij", ginv, dlower) - np.einsum("ka,mab,bij->mkij", ginv, dg, Gamma)
    return L, ginv, Gamma, dGamma


def christoffel(chart: MetricChart, x, cfg: FDConfig = FDConfig()) -> np.ndarray:
    """Gamma[k, i, j] = Gamma^k_ij."""
    chart.check_interior(x, 2 * cfg.h)
    g, dg, d2g = metric_derivs(chart, x, cfg)
    _check_pd(g)
    ginv = np.linalg.inv(g)
    lower = 0.5 * (dg.transpose(2, 0, 1) + dg.transpose(2, 1, 0) - dg)
    return np.einsum("kl,lij->kij", ginv, lower)


def orthonormal_frame(g) -> np.ndarray:
    """Columns are the Gram-Schmidt orthonormalization of the coordinate basis."""
    L = _check_pd(np.asarray(g, dtype=float))
    return np.linalg.inv(L).T


def _riemann_coords(chart: MetricChart, x, cfg: FDConfig):
    """Lower-index coordinate components P[i,j,k,l] = <R(d_i, d_j) d_k, d_l>, plus g, Gamma."""
    g, dg, d2g = metric_derivs(chart, x, cfg)
    _, _, Gamma, dGamma = _christoffel_parts(g, dg, d2g)
    # standard R^r_{s m n} = d_m G^r_{n s} - d_n G^r_{m s} + G^r_{m l} G^l_{n s} - G^r_{n l} G^l_{m s}
    Rstd = (
        np.einsum("mrns->rsmn", dGamma)
        - np.einsum("nrms->rsmn", dGamma)
        + np.einsum("rml,lns->rsmn", Gamma, Gamma)
        - np.einsum("rnl,lms->rsmn", Gamma, Gamma)
    )
    # R(X,Y) here is minus the standard R(X,Y)
    P = -np.einsum("lr,rkij->ijkl", g, Rstd)
    return P, g, Gamma


def _to_frame(T: np.ndarray, E: np.ndarray) -> np.ndarray:
    for axis in range(T.ndim):
        T = np.moveaxis(np.tensordot(T, E, axes=([axis], [0])), -1, axis)
    return T


def riemann_raw(chart: MetricChart, x, cfg: FDConfig = FDConfig()) -> np.ndarray:
    """Frame components before projection onto the curvature symmetries."""
    chart.check_interior(x, 3 * cfg.h)
    P, g, _ = _riemann_coords(chart, x, cfg)
    return _to_frame(P, orthonormal_frame(g))


def riemann_at(chart: MetricChart, x, cfg: FDConfig = FDConfig()) -> CurvTensor:
    return CurvTensor(riemann_raw(chart, x, cfg))


def frame_operator(chart: MetricChart, x, A) -> np.ndarray:
    """Express a coordinate (1,1) operator in the orthonormal frame at x."""
    E = orthonormal_frame(chart.g(x))
    return np.linalg.solve(E, np.asarray(A) @ E)


def frame_complex_structure(chart: MetricChart, x) -> np.ndarray:
    if chart.complex_structure is None:
        raise ChartError(f"chart {chart.name!r} carries no complex structure")
    return frame_operator(chart, x, chart.complex_structure)


# -- covariant derivatives -------------------------------------------------


def _weyl_coords(chart, x, cfg):
    P, g, Gamma = _riemann_coords(chart, x, cfg)
    E = orthonormal_frame(g)
    W = weyl(CurvTensor(_to_frame(P, E))).R
    return _to_frame(W, np.linalg.inv(E)), g, Gamma


def _covariant_derivative(fn, chart, x, cfg) -> tuple[np.ndarray, np.ndarray]:
    """nabla_m T_{ijkl} for a covariant 4-tensor field given by ``fn(chart, x, cfg)``."""
    n = chart.dim
    h = cfg.h
    T0, g, Gamma = fn(chart, x, cfg)
    dT = np.empty((n,) + T0.shape)
    for m in range(n):
        e = np.zeros(n)
        e[m] = h
        dT[m] = (fn(chart, x + e, cfg)[0] - fn(chart, x - e, cfg)[0]) / (2 * h)
    nab = (
        dT
        - np.einsum("ami,ajkl->mijkl", Gamma, T0)
        - np.einsum("amj,iakl->mijkl", Gamma, T0)
        - np.einsum("amk,ijal->mijkl", Gamma, T0)
        - np.einsum("aml,ijka->mijkl", Gamma, T0)
    )
    return nab, g


def bianchi2_residual(chart: MetricChart, x, cfg: FDConfig = FDConfig(), samples: int = 16, seed: int = 0) -> float:
    """max |(nabla_U R)(X,Y)Y + (nabla_Y R)(U,X)Y + (nabla_X R)(Y,U)Y| over frame and random triples."""
    chart.check_interior(x, 4 * cfg.h)
    nab, g = _covariant_derivative(_riemann_coords, chart, x, cfg)
    E = orthonormal_frame(g)
    N = _to_frame(nab, E)
    cyc = N + np.einsum("jmikl->mijkl", N) + np.einsum("imjkl->mijkl", N)
    n = chart.dim
    rng = np.random.default_rng(seed)
    worst = float(np.linalg.norm(np.einsum("mijjl->mijl", cyc), axis=-1).max())
    for U, X, Y in random_unit(rng, n, 3 * samples).reshape(samples, 3, n):
        v = np.einsum("mijkl,m,i,j,k->l", cyc, U, X, Y, Y)
        worst = max(worst, float(np.linalg.norm(v)))
    return worst


def weyl_divergence_fd(chart: MetricChart, x, Y, Z, cfg: FDConfig = FDConfig()) -> float:
    """sum_j <(nabla_{E_j} W)(E_j, Y) Y, Z> with Y, Z given in the orthonormal frame."""
    chart.check_interior(x, 4 * cfg.h)
    nab, g = _covariant_derivative(_weyl_coords, chart, x, cfg)
    N = _to_frame(nab, orthonormal_frame(g))
    return float(np.einsum("jjbkl,b,k,l->", N, Y, Y, Z))


def frame_gradient(chart: MetricChart, x, fn, h: float = 1e-5) -> np.ndarray:
    """Gradient of a scalar function in the orthonormal frame (central differences)."""
    x = np.asarray(x, dtype=float)
    d = np.array([(fn(x + h * e) - fn(x - h * e)) / (2 * h) for e in np.eye(chart.dim)])
    # components of grad along frame vector E_a are df(E_a)
    return orthonormal_frame(chart.g(x)).T @ d


# -- reports ---------------------------------------------------------------


def _spectra(R: CurvTensor, dirs: np.ndarray) -> np.ndarray:
    w, _ = jacobi_eigh(jacobi_batch(R, dirs))
    return np.atleast_2d(w)


def osserman_scan(chart: MetricChart, points, directions_per_point: int = 20,
                  cfg: FDConfig = FDConfig(), policy: TolerancePolicy = TolerancePolicy(),
                  seed: int = 0, homogeneous: bool = False) -> dict:
    """Per-point Jacobi spectra of R and W over random unit directions."""
    tol = policy.fd_tol
    rng = np.random.default_rng(seed)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    per_point = []
    ref_R = ref_W = None
    cross_R = cross_W = 0.0
    for x in points:
        raw = riemann_raw(chart, x, cfg)
        R = CurvTensor(raw)
        dirs = random_unit(rng, chart.dim, directions_per_point)
        sR = _spectra(R, dirs)
        entry = {
            "point": x.tolist(),
            "symmetry_residual": max(symmetry_residuals(raw).values()),
            "R": _osserman_entry(sR, tol),
        }
        if chart.dim >= 4:
            W = weyl(R)
            sW = _spectra(W, dirs)
            entry["W"] = _osserman_entry(sW, tol)
            entry["weyl_norm"] = float(np.sqrt(np.sum(W.R**2)))
            ref_W = sW[0] if ref_W is None else ref_W
            cross_W = max(cross_W, float(np.abs(sW - ref_W).max()))
        ref_R = sR[0] if ref_R is None else ref_R
        cross_R = max(cross_R, float(np.abs(sR - ref_R).max()))
        per_point.append(entry)
    report = {
        "chart": chart.to_spec(),
        "h": cfg.h,
        "fd_tol": tol,
        "points": per_point,
        "pointwise_osserman_R": all(p["R"]["isOsserman"] for p in per_point),
        "pointwise_osserman_W": all(p.get("W", {"isOsserman": True})["isOsserman"] for p in per_point),
    }
    if homogeneous:
        report["cross_point_deviation_R"] = cross_R
        report["cross_point_deviation_W"] = cross_W
        report["homogeneous_consistent"] = cross_R < tol
    return report


def _osserman_entry(spectra: np.ndarray, tol: float) -> dict:
    dev = float(np.abs(spectra - spectra[0]).max())
    return {
        "isOsserman": dev < tol,
        "maxSpectrumDeviation": dev,
        "referenceSpectrum": Spectrum(cluster(spectra[0], tol), tol).to_dict(),
    }


def laplacian_identity_residual(phi: Poly, x, cfg: FDConfig = FDConfig(), analytic: bool = False) -> float:
    """|Lap u - F u| with u = exp((n-2) phi / 2), F = (n-2)/2 tr K, flat coordinates."""
    from .conformal import k_from_phi

    x = np.asarray(x, dtype=float)
    n = phi.dim
    c = 0.5 * (n - 2)

    def u(y):
        return np.exp(c * phi.value(y))

    if analytic:
        grad, hess = phi.grad(x), phi.hess(x)
        lap_u = u(x) * (c * np.trace(hess) + c * c * float(grad @ grad))
    else:
        grad, hess, lap_u = _fd_laplacian_parts(phi.value, u, x, cfg.h)
        if cfg.richardson:
            g2, h2, l2 = _fd_laplacian_parts(phi.value, u, x, cfg.h / 2)
            grad, hess, lap_u = (4 * g2 - grad) / 3, (4 * h2 - hess) / 3, (4 * l2 - lap_u) / 3
    F = c * np.trace(k_from_phi(grad, hess))
    return float(abs(lap_u - F * u(x)))


def _fd_laplacian_parts(phi, u, x, h):
    n = x.size
    E = np.eye(n) * h
    grad = np.array([(phi(x + e) - phi(x - e)) / (2 * h) for e in E])
    hess = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            hess[i, j] = hess[j, i] = (phi(x + E[i] + E[j]) - phi(x + E[i] - E[j])
                                       - phi(x - E[i] + E[j]) + phi(x - E[i] - E[j])) / (4 * h * h)
    u0 = u(x)
    lap = sum((u(x + e) - 2 * u0 + u(x - e)) / h**2 for e in E)
    return grad, hess, lap
