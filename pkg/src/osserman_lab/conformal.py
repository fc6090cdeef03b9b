"""Curvature of metrics conformal to the rank-one models, and its Weyl part.

For ``<,>`` with ``g_model = f <,>``, ``f = exp(2 phi)``:

    R(X,Y) = X ^ KY + KX ^ Y + eps f (X ^ Y + T(X,Y))
    W(X,Y) = eps f (-3 nu/(n-1) X ^ Y + T(X,Y))
    T(X,Y) = sum_i (J_i X ^ J_i Y + 2 <J_i X, Y> J_i)
    K      = H(phi) - dphi (x) dphi + |dphi|^2 / 2 I

Operators are matrices acting on column vectors; a tensor ``A[i, j, k, l]``
stores ``<A(e_i, e_j) e_k, e_l>``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clifford import CliffordSystem
from .curvature import (
    CurvTensor,
    clifford_part_array,
    constant_curvature_array,
    kulkarni_nomizu_identity,
    model_system,
    norm_sq,
)
from .numkit import DEFAULT_POLICY, TolerancePolicy, eigenspaces, random_unit, sym, wedge


@dataclass(frozen=True, eq=False)
class ConformalData:
    f: float
    grad_f: np.ndarray
    phi_grad: np.ndarray
    phi_hess: np.ndarray
    eps: int
    sys: CliffordSystem

    def __post_init__(self):
        if not self.f > 0:
            raise ValueError("conformal factor must be positive")
        if self.eps not in (1, -1):
            raise ValueError("eps must be +1 or -1")
        if self.sys.nu not in (1, 3):
            raise ValueError("model systems have nu in {1, 3}")
        for name in ("grad_f", "phi_grad", "phi_hess"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.sys.n

    @property
    def nu(self) -> int:
        return self.sys.nu

    def consistency_residual(self) -> float:
        """|grad f - 2 f grad phi| (f = exp(2 phi))."""
        return float(np.abs(self.grad_f - 2.0 * self.f * self.phi_grad).max())

    @classmethod
    def from_phi(cls, phi: float, phi_grad, phi_hess, eps: int, sys: CliffordSystem) -> "ConformalData":
        f = float(np.exp(2.0 * phi))
        phi_grad = np.asarray(phi_grad, dtype=float)
        return cls(f, 2.0 * f * phi_grad, phi_grad, sym(phi_hess), eps, sys)


def t_op(sys: CliffordSystem, X, Y) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    out = np.zeros((sys.n, sys.n))
    for J in sys.J:
        out += wedge(J @ X, J @ Y) + 2.0 * np.dot(J @ X, Y) * J
    return out


def t_tensor(sys: CliffordSystem) -> np.ndarray:
    return clifford_part_array(sys.stack, np.ones(sys.nu))


def k_from_phi(phi_grad, phi_hess) -> np.ndarray:
    g = np.asarray(phi_grad, dtype=float)
    return sym(phi_hess) - np.outer(g, g) + 0.5 * float(g @ g) * np.eye(g.size)


def model_weyl_array(nu: int, eps: int, f: float, sys: CliffordSystem) -> np.ndarray:
    n = sys.n
    return eps * f * (constant_curvature_array(n, -3.0 * nu / (n - 1)) + t_tensor(sys))


def model_weyl(nu: int, eps: int, f: float, sys: CliffordSystem | None = None, n: int | None = None) -> CurvTensor:
    if sys is None:
        sys = model_system(nu, eps, n)
    if sys.nu != nu:
        raise ValueError("system size does not match nu")
    return CurvTensor(model_weyl_array(nu, eps, f, sys), sys)


def conformal_curvature(data: ConformalData, K) -> CurvTensor:
    n = data.n
    R = kulkarni_nomizu_identity(sym(K)) + data.eps * data.f * (
        constant_curvature_array(n, 1.0) + t_tensor(data.sys)
    )
    return CurvTensor(R, data.sys)


def c_const(nu: int, n: int) -> float:
    return 6.0 * nu * n * (n + 2) * (n - nu - 1) / (n - 1)


def weyl_norm_sq(W: CurvTensor) -> float:
    """Sum of squares of all n^4 components; equals C_{nu n} f^2 on model Weyl tensors."""
    return norm_sq(W)


def _op(A: np.ndarray) -> np.ndarray:
    """Per-(i, j) operator matrices from component tensor: out[i, j] = op of A(e_i, e_j)."""
    return A.transpose(0, 1, 3, 2)


def weyl_cov_deriv(data: ConformalData, Z) -> np.ndarray:
    """Components ``D[i,j,k,l] = <(nabla_Z W)(e_i, e_j) e_k, e_l>``."""
    Z = np.asarray(Z, dtype=float)
    n, nu, eps = data.n, data.nu, data.eps
    gf = data.grad_f
    T = t_tensor(data.sys)
    base = constant_curvature_array(n, -3.0 * nu / (n - 1)) + T
    B = wedge(gf, Z)
    Top = _op(T)
    comm = np.einsum("ijab,bc->ijac", Top, B) - np.einsum("ab,ijbc->ijac", B, Top)
    # T(B e_i, e_j) and T(e_i, B e_j)
    first = np.einsum("ai,ajkl->ijkl", B, T)
    second = np.einsum("aj,iakl->ijkl", B, T)
    return eps * float(gf @ Z) * base + 0.5 * eps * (_op(comm) + first + second)


def weyl_divergence(data: ConformalData, Y, Z) -> float:
    """sum_j <(nabla_{E_j} W)(E_j, Y) Y, Z> over the standard orthonormal frame."""
    Y = np.asarray(Y, dtype=float)
    Z = np.asarray(Z, dtype=float)
    total = 0.0
    for j, E in enumerate(np.eye(data.n)):
        D = weyl_cov_deriv(data, E)
        total += float(np.einsum("bkl,b,k,l->", D[j], Y, Y, Z))
    return total


def divergence_closed_form(data: ConformalData, Z) -> float:
    n, nu = data.n, data.nu
    return -3.0 * data.eps * nu * (n - 3) / (2.0 * (n - 1)) * float(data.grad_f @ np.asarray(Z, dtype=float))


def orthogonal_to_orbit(sys: CliffordSystem, Z, rng: np.random.Generator) -> np.ndarray:
    """Random unit vector orthogonal to ``Z`` and to every ``J_i Z``."""
    Z = np.asarray(Z, dtype=float)
    span = np.column_stack([Z] + [J @ Z for J in sys.J])
    Q, _ = np.linalg.qr(span)
    v = rng.standard_normal(sys.n)
    v -= Q @ (Q.T @ v)
    return v / np.linalg.norm(v)


# -- Codazzi rigidity ------------------------------------------------------


def codazzi_residual(rho, sys: CliffordSystem, samples: int = 8, seed: int = 0,
                     policy: TolerancePolicy = DEFAULT_POLICY) -> float:
    """Worst |sum eta_i (2<J_iX,Y>J_iZ + <J_iZ,Y>J_iX - <J_iZ,X>J_iY)| over eigenspace triples.

    X, Y, Z range over eigenbasis vectors and ``samples`` seeded random
    unit vectors of each eigenspace of ``rho``; Z lies in an eigenspace
    different from those of X and Y.
    """
    if sys.nu < 1:
        raise ValueError("codazzi_residual needs nu >= 1")
    spaces = eigenspaces(rho, policy.cluster_tol)
    if len(spaces) < 2:
        return 0.0
    rng = np.random.default_rng(seed)
    vecs = []
    for E in spaces:
        V = [E[:, c] for c in range(E.shape[1])]
        if E.shape[1] > 1 and samples:
            V.extend(random_unit(rng, E.shape[1], samples) @ E.T)
        vecs.append(np.array(V))
    A = clifford_part_array(sys.stack, sys.eta)
    worst = 0.0
    for a, Zs in enumerate(vecs):
        # contract Z first: M[i, j, l] = R(e_i, e_j) Z
        for Z in Zs:
            M = np.einsum("ijkl,k->ijl", A, Z)
            others = [V for b, V in enumerate(vecs) if b != a]
            for Xs in others:
                MX = np.einsum("si,ijl->sjl", Xs, M)
                for Ys in others:
                    out = np.einsum("sjl,tj->stl", MX, Ys)
                    worst = max(worst, float(np.linalg.norm(out, axis=-1).max()))
    return worst
