"""Clifford systems: anticommuting almost Hermitian structures on R^n.

A system is ``nu`` skew-symmetric orthogonal matrices ``J_i`` with
``J_i J_j + J_j J_i = -2 delta_ij I`` together with the constants
``lambda0, eta_1..eta_nu`` of the curvature tensor they induce.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import octonion
from .numkit import DEFAULT_POLICY, TolerancePolicy, null_space, random_orthogonal, sqrt_inv_psd

ROT = np.array([[0.0, -1.0], [1.0, 0.0]])
FLIP = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGN = np.array([[1.0, 0.0], [0.0, -1.0]])
I2 = np.eye(2)

MAX_EXTENSION_RETRIES = 32


class HurwitzError(ValueError):
    """No Clifford module structure of the requested shape exists."""


class ExtensionError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class CliffordSystem:
    n: int
    J: tuple[np.ndarray, ...]
    lambda0: float
    eta: tuple[float, ...]
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        J = tuple(np.array(j, dtype=float) for j in self.J)
        for j in J:
            if j.shape != (self.n, self.n):
                raise ValueError(f"operator shape {j.shape} does not match n={self.n}")
            j.setflags(write=False)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "eta", tuple(float(e) for e in self.eta))
        object.__setattr__(self, "lambda0", float(self.lambda0))
        if len(self.eta) != len(J):
            raise ValueError("need one eta per operator")
        if any(e == 0 for e in self.eta):
            raise ValueError("eta entries must be nonzero")

    @property
    def nu(self) -> int:
        return len(self.J)

    @property
    def stack(self) -> np.ndarray:
        """Operators as an array of shape ``(nu, n, n)``."""
        if not self.J:
            return np.zeros((0, self.n, self.n))
        return np.stack(self.J)

    def with_constants(self, lambda0=None, eta=None) -> "CliffordSystem":
        return CliffordSystem(
            self.n,
            self.J,
            self.lambda0 if lambda0 is None else lambda0,
            self.eta if eta is None else eta,
            dict(self.meta),
        )

    def conjugated(self, Q: np.ndarray) -> "CliffordSystem":
        return CliffordSystem(self.n, tuple(Q @ j @ Q.T for j in self.J), self.lambda0, self.eta, dict(self.meta))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "nu": self.nu,
            "lambda0": self.lambda0,
            "eta": list(self.eta),
            "J": [j.reshape(-1).tolist() for j in self.J],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CliffordSystem":
        try:
            n = int(d["n"])
            nu = int(d["nu"])
            J = [np.asarray(j, dtype=float).reshape(n, n) for j in d["J"]]
            eta = [float(e) for e in d["eta"]]
            lambda0 = float(d["lambda0"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed Clifford system: {exc}") from exc
        if len(J) != nu or len(eta) != nu:
            raise ValueError("malformed Clifford system: nu does not match J/eta lengths")
        return cls(n, tuple(J), lambda0, tuple(eta))


# -- Radon-Hurwitz arithmetic ---------------------------------------------


def radon_bound(n: int) -> int:
    """Largest nu for which R^n carries nu anticommuting almost Hermitian structures."""
    if n < 1:
        raise ValueError("n must be positive")
    k = 0
    while n % 2 == 0:
        n //= 2
        k += 1
    a, b = divmod(k, 4)
    return 2**b + 8 * a - 1


def min_module_dim(nu: int) -> int:
    if nu < 0:
        raise ValueError("nu must be non-negative")
    d = 1
    while radon_bound(d) < nu:
        d *= 2
    return d


# -- construction ---------------------------------------------------------


def _irreducible(nu: int) -> list[np.ndarray]:
    """Generators on R^d, d = min_module_dim(nu), from 2x2 Kronecker blocks."""
    if nu == 0:
        return []
    if nu == 1:
        return [ROT.copy()]
    if nu <= 3:
        return [np.kron(I2, ROT), np.kron(ROT, SIGN), np.kron(ROT, FLIP)][:nu]
    if nu <= 7:
        return [octonion.right_mult_operator(octonion.basis(i)) for i in range(1, nu + 1)]
    # Cl(nu-1) on R^d gives Cl(nu) on R^2d: J_i -> SIGN (x) J_i, new generator ROT (x) I_d
    prev = _irreducible(nu - 1)
    d = prev[0].shape[0]
    gens = [np.kron(SIGN, j) for j in prev] + [np.kron(ROT, np.eye(d))]
    if gens[0].shape[0] != min_module_dim(nu):
        raise HurwitzError(f"no doubling construction for nu={nu}")
    return gens


def generate(n: int, nu: int, lambda0: float = 1.0, eta=None, seed: int | None = None) -> CliffordSystem:
    """Build a validated Clifford system on R^n.

    With ``seed`` given, the canonical generators are conjugated by a
    seeded random orthogonal matrix.
    """
    if nu > radon_bound(n):
        raise HurwitzError(f"nu={nu} exceeds the Radon-Hurwitz bound {radon_bound(n)} for n={n}")
    d = min_module_dim(nu)
    if n % d:
        raise HurwitzError(f"n={n} is not a multiple of the irreducible module dimension {d}")
    eta = (1.0,) * nu if eta is None else tuple(eta)
    J = [np.kron(j, np.eye(n // d)) for j in _irreducible(nu)]
    sys = CliffordSystem(n, tuple(J), lambda0, eta, {"kind": "canonical"})
    if seed is not None:
        sys = sys.conjugated(random_orthogonal(np.random.default_rng(seed), n))
    report = validate(sys)
    if not report["pass"]:
        raise AssertionError(f"generated system failed validation: {report}")
    return sys


def octonionic(nu: int, lambda0: float = 1.0, eta=None) -> CliffordSystem:
    """First ``nu`` right multiplications by imaginary octonion units on R^8."""
    eta = (1.0,) * nu if eta is None else tuple(eta)
    J = tuple(octonion.right_mult_operator(octonion.basis(i)) for i in range(1, nu + 1))
    return CliffordSystem(8, J, lambda0, eta, {"kind": "octonionic"})


def quaternionic_block(n: int = 8, lambda0: float = 1.0, eta=None) -> CliffordSystem:
    """nu=3 system with J1 J2 = J3 acting blockwise on R^n (4 | n)."""
    return generate(n, 3, lambda0, eta)


def validate(sys: CliffordSystem, policy: TolerancePolicy = DEFAULT_POLICY) -> dict:
    I = np.eye(sys.n)
    skewness = orthogonality = anticomm = 0.0
    for i, Ji in enumerate(sys.J):
        skewness = max(skewness, float(np.abs(Ji + Ji.T).max()))
        orthogonality = max(orthogonality, float(np.abs(Ji.T @ Ji - I).max()))
        for j in range(i, sys.nu):
            Jj = sys.J[j]
            target = -2.0 * I if i == j else 0.0
            anticomm = max(anticomm, float(np.abs(Ji @ Jj + Jj @ Ji - target).max()))
    residuals = {"skew": skewness, "orthogonal": orthogonality, "anticommute": anticomm}
    return {
        "residuals": residuals,
        "failures": sorted(k for k, v in residuals.items() if not v < policy.identity_tol),
        "pass": all(v < policy.identity_tol for v in residuals.values()),
    }


# -- the R^8 dichotomy ----------------------------------------------------


class R8Class(str, enum.Enum):
    CLIFF3_SPECIAL = "Cliff3Special"
    EXTENDABLE = "Extendable"


def quaternionic_sign(sys: CliffordSystem, policy: TolerancePolicy = DEFAULT_POLICY) -> int:
    """+1 / -1 if ``J1 J2 = +-J3`` (nu = 3), else 0."""
    if sys.nu != 3:
        return 0
    P = sys.J[0] @ sys.J[1]
    for s in (1, -1):
        if np.linalg.norm(P - s * sys.J[2]) < policy.identity_tol:
            return s
    return 0


def classify_r8(sys: CliffordSystem, policy: TolerancePolicy = DEFAULT_POLICY) -> R8Class:
    if sys.n != 8 or not 1 <= sys.nu <= 7:
        raise ValueError("classify_r8 needs n=8 and 1 <= nu <= 7")
    if quaternionic_sign(sys, policy):
        return R8Class.CLIFF3_SPECIAL
    return R8Class.EXTENDABLE


def _anticommutant_basis(J: list[np.ndarray], n: int) -> np.ndarray:
    """Basis (rows, flattened) of skew K with K J_i = -J_i K for all i."""
    iu = np.triu_indices(n, 1)
    m = len(iu[0])
    # parametrize skew K by its strict upper triangle
    B = np.zeros((m, n, n))
    B[np.arange(m), iu[0], iu[1]] = 1.0
    B[np.arange(m), iu[1], iu[0]] = -1.0
    if not J:
        return B.reshape(m, -1)
    rows = [np.einsum("mab,bc->mac", B, j) + np.einsum("ab,mbc->mac", j, B) for j in J]
    A = np.concatenate([r.reshape(m, -1) for r in rows], axis=1).T
    N = null_space(A)
    return (N.T @ B.reshape(m, -1))


def _random_extension(J: list[np.ndarray], n: int, rng: np.random.Generator) -> np.ndarray | None:
    basis = _anticommutant_basis(J, n)
    if basis.shape[0] == 0:
        return None
    M = (rng.standard_normal(basis.shape[0]) @ basis).reshape(n, n)
    try:
        K = M @ sqrt_inv_psd(-(M @ M))
    except np.linalg.LinAlgError:
        return None
    return 0.5 * (K - K.T)


def extend_to_seven(sys: CliffordSystem, xi: float, rng: np.random.Generator | None = None,
                    policy: TolerancePolicy = DEFAULT_POLICY) -> CliffordSystem:
    """Complete an extendable system on R^8 to seven generators.

    The constants become ``lambda0 - 3 xi, eta_i + xi, xi, ..., xi`` so the
    induced curvature tensor is unchanged.  A full (nu = 7) input is returned
    as is.
    """
    if classify_r8(sys, policy) is not R8Class.EXTENDABLE:
        raise ExtensionError("Cliff(3) systems with J1 J2 = +-J3 do not extend")
    if sys.nu == 7:
        return sys
    if xi == 0 or any(xi == -e for e in sys.eta):
        raise ValueError("xi must be nonzero and differ from every -eta_i")
    rng = rng or np.random.default_rng(0)
    for _attempt in range(MAX_EXTENSION_RETRIES):
        J = list(sys.J)
        while len(J) < 7:
            K = _random_extension(J, sys.n, rng)
            if K is None:
                break
            J.append(K)
            if len(J) == 3 and quaternionic_sign(CliffordSystem(8, tuple(J), 0.0, (1.0,) * 3), policy):
                break
        if len(J) != 7:
            continue
        eta = tuple(e + xi for e in sys.eta) + (xi,) * (7 - sys.nu)
        out = CliffordSystem(8, tuple(J), sys.lambda0 - 3 * xi, eta, {"kind": "extended"})
        if validate(out, policy)["pass"]:
            return out
    raise ExtensionError(f"no admissible extension found after {MAX_EXTENSION_RETRIES} retries")


def normalize_product_sign(sys: CliffordSystem) -> tuple[CliffordSystem, int]:
    """For nu = 7 on R^8: flip J7 if needed so that J1...J7 = +I; returns the original sign."""
    if sys.n != 8 or sys.nu != 7:
        raise ValueError("needs a nu=7 system on R^8")
    P = np.linalg.multi_dot(sys.J)
    sign = 1 if np.allclose(P, np.eye(8), atol=1e-10) else -1 if np.allclose(P, -np.eye(8), atol=1e-10) else 0
    if sign == 0:
        raise ArithmeticError("J1...J7 is not +-I")
    if sign == 1:
        return sys, 1
    J = list(sys.J)
    J[-1] = -J[-1]
    return CliffordSystem(8, tuple(J), sys.lambda0, sys.eta, dict(sys.meta)), -1


# -- Lemma-style inequality scan -------------------------------------------

EQUALITY_EXPECTED = {(6, 1), (12, 3), (24, 7)}
EXCEPTIONS_EXPECTED = {(24, 7), (32, 8)}


def nvsnu_scan(max_n: int = 64) -> dict:
    """Check n >= 3nu+3, n > 4nu-2 and nu < 2^l < n over every admissible (n, nu).

    Dimensions 2, 4, 8, 16 are skipped and nu ranges over 1..radon_bound(n).
    """
    if max_n > 512:
        raise ValueError("max_n must be <= 512")
    equality, exceptions, viol_i, viol_iii = set(), set(), [], []
    pairs = 0
    for n in range(1, max_n + 1):
        if n in (2, 4, 8, 16):
            continue
        for nu in range(1, radon_bound(n) + 1):
            pairs += 1
            if n < 3 * nu + 3:
                viol_i.append((n, nu))
            elif n == 3 * nu + 3:
                equality.add((n, nu))
            if not n > 4 * nu - 2:
                exceptions.add((n, nu))
            if not any(nu < 2**l < n for l in range(n.bit_length() + 1)):
                viol_iii.append((n, nu))
    unexpected_equality = sorted(equality - EQUALITY_EXPECTED)
    ii_unlisted = sorted(exceptions - EXCEPTIONS_EXPECTED)
    return {
        "max_n": max_n,
        "pairs_checked": pairs,
        "violations_i": sorted(viol_i),
        "violations_ii": ii_unlisted,
        "violations_iii": sorted(viol_iii),
        "equality_i": sorted(equality),
        "exceptions_ii": sorted(exceptions),
        "unexpected_equality_i": unexpected_equality,
        "violations": len(viol_i) + len(ii_unlisted) + len(viol_iii) + len(unexpected_equality),
    }
