"""Algebraic curvature tensors on Euclidean R^n.

Components are ``R[i, j, k, l] = <R(e_i, e_j) e_k, e_l>`` with the sign
convention in which the unit sphere has ``R(X, Y) Z = <X,Z> Y - <Y,Z> X``;
the Jacobi operator ``R_X Y = R(X, Y) X`` then has eigenvalue ``+1`` on
``X^perp`` for the sphere.  All frames are orthonormal here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .clifford import CliffordSystem, generate
from .numkit import DEFAULT_POLICY, Spectrum, TolerancePolicy, cluster, jacobi_eigh, random_unit, sym
from .parallel import chunked_map


@dataclass(frozen=True, eq=False)
class CurvTensor:
    """Immutable rank-4 curvature array; projected onto curvature symmetries unless ``raw``."""

    R: np.ndarray
    system: CliffordSystem | None = None

    def __init__(self, R, system: CliffordSystem | None = None, raw: bool = False):
        R = np.array(R, dtype=float)
        n = R.shape[0]
        if R.shape != (n, n, n, n):
            raise ValueError(f"expected an (n,n,n,n) array, got {R.shape}")
        if not raw:
            R = project_curvature(R)
        R.setflags(write=False)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "system", system)

    @property
    def n(self) -> int:
        return self.R.shape[0]

    def __add__(self, other: "CurvTensor") -> "CurvTensor":
        return CurvTensor(self.R + other.R)

    def __sub__(self, other: "CurvTensor") -> "CurvTensor":
        return CurvTensor(self.R - other.R)

    def __mul__(self, c: float) -> "CurvTensor":
        return CurvTensor(c * self.R)

    __rmul__ = __mul__

    def apply(self, X, Y) -> np.ndarray:
        """Matrix of the operator ``R(X, Y)``."""
        return np.einsum("i,j,ijkl->lk", X, Y, self.R)

    def distance(self, other: "CurvTensor") -> float:
        return float(np.abs(self.R - other.R).max())

    def to_dict(self) -> dict:
        d = {"n": self.n, "R": self.R.reshape(-1).tolist()}
        if self.system is not None:
            d["system"] = self.system.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CurvTensor":
        try:
            n = int(d["n"])
            R = np.asarray(d["R"], dtype=float).reshape(n, n, n, n)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed curvature tensor: {exc}") from exc
        system = CliffordSystem.from_dict(d["system"]) if d.get("system") else None
        return cls(R, system, raw=True)


def _cyclic_first_three(R: np.ndarray) -> np.ndarray:
    return R + np.einsum("jkil->ijkl", R) + np.einsum("kijl->ijkl", R)


def project_curvature(R: np.ndarray) -> np.ndarray:
    """Orthogonal projection onto tensors with the algebraic curvature symmetries."""
    R = 0.5 * (R - R.transpose(1, 0, 2, 3))
    R = 0.5 * (R - R.transpose(0, 1, 3, 2))
    R = 0.5 * (R + R.transpose(2, 3, 0, 1))
    return R - _cyclic_first_three(R) / 3.0


def symmetry_residuals(R) -> dict[str, float]:
    R = np.asarray(R, dtype=float)
    return {
        "antisym_first_pair": float(np.abs(R + R.transpose(1, 0, 2, 3)).max()),
        "antisym_last_pair": float(np.abs(R + R.transpose(0, 1, 3, 2)).max()),
        "pair_exchange": float(np.abs(R - R.transpose(2, 3, 0, 1)).max()),
        "first_bianchi": float(np.abs(_cyclic_first_three(R)).max()),
    }


# -- constructions ---------------------------------------------------------


def kulkarni_nomizu_identity(S) -> np.ndarray:
    """Components of ``(X, Y) -> X ^ S Y + S X ^ Y`` for symmetric ``S``."""
    S = np.asarray(S, dtype=float)
    I = np.eye(S.shape[0])
    return (
        np.einsum("ik,jl->ijkl", I, S)
        + np.einsum("ik,jl->ijkl", S, I)
        - np.einsum("il,jk->ijkl", I, S)
        - np.einsum("il,jk->ijkl", S, I)
    )


def constant_curvature_array(n: int, lambda0: float = 1.0) -> np.ndarray:
    I = np.eye(n)
    return lambda0 * (np.einsum("ik,jl->ijkl", I, I) - np.einsum("il,jk->ijkl", I, I))


def clifford_part_array(J: np.ndarray, eta) -> np.ndarray:
    """sum_a eta_a (2<J X,Y> J Z + <J Z,Y> J X - <J Z,X> J Y) as components."""
    J = np.asarray(J, dtype=float).reshape(-1, *np.shape(J)[-2:])
    n = J.shape[-1]
    if J.shape[0] == 0:
        return np.zeros((n, n, n, n))
    A = np.asarray(eta, dtype=float)[:, None, None] * J.transpose(0, 2, 1)  # eta * <J e_i, e_j>
    At = J.transpose(0, 2, 1)
    return (
        2.0 * np.einsum("aij,akl->ijkl", A, At)
        + np.einsum("akj,ail->ijkl", A, At)
        - np.einsum("aki,ajl->ijkl", A, At)
    )


def from_clifford(sys: CliffordSystem) -> CurvTensor:
    R = constant_curvature_array(sys.n, sys.lambda0) + clifford_part_array(sys.stack, sys.eta)
    return CurvTensor(R, sys)


def from_confcs(rho, sys: CliffordSystem) -> CurvTensor:
    """``X^rho Y + rho X ^ Y`` plus the eta-part of ``sys`` (its lambda0 is ignored)."""
    rho = sym(rho)
    R = kulkarni_nomizu_identity(rho) + clifford_part_array(sys.stack, sys.eta)
    return CurvTensor(R, sys)


def constant_curvature(n: int, lambda0: float = 1.0) -> CurvTensor:
    return CurvTensor(constant_curvature_array(n, lambda0))


def canonical_tensor(A) -> CurvTensor:
    """``R(X,Y)Z = <AX,Z> AY - <AY,Z> AX`` for symmetric ``A``."""
    A = sym(A)
    return CurvTensor(np.einsum("ik,jl->ijkl", A, A) - np.einsum("jk,il->ijkl", A, A))


def model_system(nu: int, eps: int, n: int) -> CliffordSystem:
    if nu not in (1, 3) or eps not in (1, -1):
        raise ValueError("model tensors need nu in {1,3} and eps in {+1,-1}")
    if nu == 1 and n % 2:
        raise ValueError("nu=1 model needs even n")
    if nu == 3 and n % 4:
        raise ValueError("nu=3 model needs n divisible by 4")
    return generate(n, nu, float(eps), (float(eps),) * nu)


def model_tensor(nu: int, eps: int, n: int) -> CurvTensor:
    """Curvature of the normalized rank-one model (CP, CH for nu=1; HP, HH for nu=3)."""
    return from_clifford(model_system(nu, eps, n))


# -- contractions ----------------------------------------------------------


def jacobi(R: CurvTensor, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return sym(np.einsum("i,k,ijkl->lj", X, X, R.R))


def jacobi_batch(R: CurvTensor, Xs) -> np.ndarray:
    Xs = np.asarray(Xs, dtype=float)
    M = np.einsum("si,sk,ijkl->slj", Xs, Xs, R.R)
    return 0.5 * (M + M.transpose(0, 2, 1))


def ricci(R: CurvTensor) -> np.ndarray:
    return sym(np.einsum("ijil->jl", R.R))


def scalar(R: CurvTensor) -> float:
    return float(np.trace(ricci(R)))


def schouten(R: CurvTensor) -> np.ndarray:
    n = R.n
    Ric = ricci(R)
    return (Ric - np.trace(Ric) / (2.0 * (n - 1)) * np.eye(n)) / (n - 2)


def weyl(R: CurvTensor) -> CurvTensor:
    if R.n < 4:
        raise ValueError("the Weyl tensor needs n >= 4")
    return CurvTensor(R.R - kulkarni_nomizu_identity(schouten(R)))


def weyl_lambda0(sys: CliffordSystem) -> float:
    """The lambda0 making the Clifford tensor of ``sys`` Ricci-flat: -3 sum(eta)/(n-1)."""
    return -3.0 * sum(sys.eta) / (sys.n - 1)


def recover_rho(R: CurvTensor, lambda0: float) -> np.ndarray:
    """rho = Ric/(n-2) + (lambda0/2 - scal/(2(n-1)(n-2))) I."""
    n = R.n
    if n < 3:
        raise ValueError("recover_rho needs n >= 3")
    Ric = ricci(R)
    scal = float(np.trace(Ric))
    return sym(Ric / (n - 2) + (0.5 * lambda0 - scal / (2.0 * (n - 1) * (n - 2))) * np.eye(n))


def norm_sq(R: CurvTensor) -> float:
    return float(np.sum(R.R * R.R))


# -- Osserman verification -------------------------------------------------


def predicted_spectrum(sys: CliffordSystem, tol: float) -> tuple[tuple[float, int], ...]:
    """Jacobi spectrum of a unit vector for the tensor induced by ``sys``."""
    values = [0.0] + [sys.lambda0] * (sys.n - 1 - sys.nu) + [sys.lambda0 + 3 * e for e in sys.eta]
    return cluster(values, tol)


@dataclass(frozen=True)
class OssermanReport:
    is_osserman: bool
    reference_spectrum: Spectrum
    max_spectrum_deviation: float
    samples_used: int

    def to_dict(self) -> dict:
        return {
            "isOsserman": self.is_osserman,
            "referenceSpectrum": self.reference_spectrum.to_dict(),
            "maxSpectrumDeviation": self.max_spectrum_deviation,
            "samplesUsed": self.samples_used,
        }


def osserman_directions(n: int, samples: int, rng: np.random.Generator,
                        system: CliffordSystem | None = None) -> np.ndarray:
    """Basis vectors, ceil(samples/2) random unit vectors and their J-orbit directions."""
    if samples < n:
        raise ValueError("samples must be at least n")
    X = random_unit(rng, n, math.ceil(samples / 2))
    dirs = [np.eye(n), X]
    if system is not None and system.nu:
        JX = np.einsum("aij,sj->asi", system.stack, X).reshape(-1, n)
        dirs.append(JX / np.linalg.norm(JX, axis=1, keepdims=True))
    return np.concatenate(dirs)


def osserman_check(R: CurvTensor, samples: int = 200, policy: TolerancePolicy = DEFAULT_POLICY,
                   seed: int = 0, directions=None) -> OssermanReport:
    """Compare sorted Jacobi eigenvalues over many unit directions (sup norm)."""
    if directions is None:
        directions = osserman_directions(R.n, samples, np.random.default_rng(seed), R.system)
    directions = np.asarray(directions, dtype=float)

    def spectra(chunk):
        w, _ = jacobi_eigh(jacobi_batch(R, chunk))
        return list(w)

    W = np.array(chunked_map(spectra, directions))
    ref = W[0]
    dev = float(np.abs(W - ref).max()) if len(W) > 1 else 0.0
    spec = Spectrum(cluster(ref, policy.cluster_tol), policy.cluster_tol, values=ref)
    return OssermanReport(dev < policy.cluster_tol, spec, dev, len(W))
