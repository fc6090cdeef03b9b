"""Octonion and bioctonion arithmetic.

The multiplication table is produced by Cayley-Dickson doubling,
``(a, b)(c, d) = (ac - d*b, da + bc*)``, applied recursively from the
reals.  Basis index ``2**k + m`` is the pair ``(0, e_m)`` at level
``k``, so ``e4 = (0, 1)``, ``e5 = e1 e4``, ``e6 = e2 e4``, ``e7 = e3 e4``.

Elements are length-8 numpy arrays (real for octonions, complex for
bioctonions); every function accepts a leading batch dimension.  The inner
product is the bilinear ``sum(a*b)``: the octonion identities are polynomial,
so the same formulas carry over to the complexification.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .numkit import DEFAULT_POLICY, TolerancePolicy, projector, random_unit


def _cd_conj(x: np.ndarray) -> np.ndarray:
    out = -x.copy()
    out[..., 0] = x[..., 0]
    return out


def _cd_mul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Recursive Cayley-Dickson product of two vectors of length 2**k."""
    n = x.shape[-1]
    if n == 1:
        return x * y
    h = n // 2
    a, b = x[..., :h], x[..., h:]
    c, d = y[..., :h], y[..., h:]
    first = _cd_mul(a, c) - _cd_mul(_cd_conj(d), b)
    second = _cd_mul(d, a) + _cd_mul(b, _cd_conj(c))
    return np.concatenate([first, second], axis=-1)


@lru_cache(maxsize=None)
def structure_constants(dim: int = 8) -> np.ndarray:
    """``C[i, j, k]`` = coefficient of ``e_k`` in ``e_i e_j``."""
    E = np.eye(dim)
    C = np.zeros((dim, dim, dim))
    for i in range(dim):
        for j in range(dim):
            C[i, j] = _cd_mul(E[i], E[j])
    C.setflags(write=False)
    return C


def signed_table(dim: int = 8) -> list[list[int]]:
    """``T[i][j] = s * (k + 1)`` where ``e_i e_j = s e_k`` (1-based, signed)."""
    C = structure_constants(dim)
    table = []
    for i in range(dim):
        row = []
        for j in range(dim):
            k = int(np.flatnonzero(C[i, j])[0])
            row.append(int(C[i, j, k]) * (k + 1))
        table.append(row)
    return table


def basis(i: int, dtype=float) -> np.ndarray:
    e = np.zeros(8, dtype=dtype)
    e[i] = 1
    return e


ONE = basis(0)


def mul(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    return np.einsum("...i,...j,ijk->...k", a, b, structure_constants(8))


def conj(a) -> np.ndarray:
    a = np.array(a, copy=True)
    a[..., 1:] *= -1
    return a


def inner(a, b):
    """Bilinear inner product (no complex conjugation)."""
    return np.sum(np.asarray(a) * np.asarray(b), axis=-1)


def norm_sq(a):
    return inner(a, a)


def real_part(a):
    return np.asarray(a)[..., 0]


def inverse(a) -> np.ndarray:
    a = np.asarray(a)
    return conj(a) / norm_sq(a)[..., None]


def scalar(x) -> np.ndarray:
    """The element ``x * 1``; ``x`` may be a batch of scalars."""
    x = np.asarray(x)
    out = np.zeros(x.shape + (8,), dtype=np.result_type(x, float))
    out[..., 0] = x
    return out


def identity_residuals(a, b, c) -> dict[str, float]:
    """Max residual of each standard octonion identity over a batch of triples.

    Works unchanged for bioctonions since every identity is polynomial.
    """
    a, b, c = (np.atleast_2d(np.asarray(v)) for v in (a, b, c))
    ab = mul(a, b)
    ac = mul(a, c)
    sq = norm_sq(a)
    checks = {
        "conjugate": conj(a) - (2 * scalar(inner(a, ONE)) - a),
        "inner_conj_invariant": inner(a, b) - inner(conj(a), conj(b)),
        "inner_from_product": scalar(inner(a, b)) - 0.5 * (mul(conj(a), b) + mul(conj(b), a)),
        "left_alternative": mul(a, ab) - mul(mul(a, a), b),
        "inner_left_adjoint": inner(a, mul(b, c)) - inner(mul(conj(b), a), c),
        "inner_right_adjoint": inner(a, mul(b, c)) - inner(mul(a, conj(c)), b),
        "polarized_composition": mul(mul(a, conj(b)), c) + mul(mul(a, conj(c)), b)
        - 2 * inner(b, c)[..., None] * a,
        "left_isometry": inner(ab, ac) - sq * inner(b, c),
        "right_isometry": inner(mul(b, a), mul(c, a)) - sq * inner(b, c),
    }
    return {k: float(np.max(np.abs(v))) for k, v in checks.items()}


def inverse_residuals(a) -> dict[str, float]:
    """Residuals of ``a^-1 a = a a^-1 = 1``; meaningful for real octonions only."""
    a = np.atleast_2d(np.asarray(a))
    inv = inverse(a)
    return {
        "inverse_left": float(np.max(np.abs(mul(inv, a) - ONE))),
        "inverse_right": float(np.max(np.abs(mul(a, inv) - ONE))),
    }


def random_octonions(rng: np.random.Generator, size: int) -> np.ndarray:
    return random_unit(rng, 8, size)


def random_bioctonions(rng: np.random.Generator, size: int) -> np.ndarray:
    z = rng.standard_normal((size, 8)) + 1j * rng.standard_normal((size, 8))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def zero_divisor_pair() -> tuple[np.ndarray, np.ndarray]:
    """The bioctonions ``i*1 + e1`` and ``i*1 - e1``."""
    a = np.zeros(8, dtype=complex)
    b = np.zeros(8, dtype=complex)
    a[0], a[1] = 1j, 1
    b[0], b[1] = 1j, -1
    return a, b


def hermitian_norm(a) -> float:
    return float(np.sqrt(np.sum(np.abs(np.asarray(a)) ** 2)))


def right_mult_operator(u) -> np.ndarray:
    """8x8 matrix of ``X -> X u`` for an imaginary octonion ``u``."""
    u = np.asarray(u, dtype=float)
    if abs(u[0]) > 1e-14 * max(1.0, np.linalg.norm(u)):
        raise ValueError("right_mult_operator requires an imaginary octonion")
    # column j is e_j u
    return np.einsum("j,ijk->ki", u, structure_constants(8))


def left_mult_operator(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return np.einsum("i,ijk->kj", u, structure_constants(8))


def generator_product_sign() -> int:
    """Sign ``s`` with ``J1 J2 ... J7 = s I`` for the right multiplications by ``e1..e7``."""
    P = np.eye(8)
    for i in range(1, 8):
        P = P @ right_mult_operator(basis(i))
    for s in (1, -1):
        if np.allclose(P, s * np.eye(8), atol=1e-12):
            return s
    raise ArithmeticError("product of generators is not +-I")


# -- Cayley planes ---------------------------------------------------------


@dataclass(frozen=True)
class CayleyPlane:
    basis: np.ndarray  # (4, 8), orthonormal rows

    @property
    def projector(self) -> np.ndarray:
        return self.basis.T @ self.basis

    def complement(self) -> "CayleyPlane":
        P = np.eye(8) - self.projector
        w, V = np.linalg.eigh(P)
        return CayleyPlane(V[:, w > 0.5].T.copy())


def orthonormal_rows(vectors, rtol: float = 1e-10) -> np.ndarray:
    V = np.asarray(vectors, dtype=float)
    Q, R = np.linalg.qr(V.T)
    d = np.abs(np.diag(R))
    if d.min() <= rtol * max(d.max(), 1.0):
        raise ValueError("degenerate span")
    return Q.T.copy()


def _closure_residual(B: np.ndarray, triples) -> float:
    P = B.T @ B
    worst = 0.0
    for X, Y, Z in triples:
        w = mul(X, mul(conj(Y), Z))
        worst = max(worst, float(np.linalg.norm(w - P @ w)))
    return worst


def cayley_closure_residual(B) -> float:
    """max over basis triples of dist(X(Y*Z), span B); ``B`` has orthonormal rows."""
    B = np.asarray(B, dtype=float)
    triples = [(B[i], B[j], B[k]) for i in range(4) for j in range(4) for k in range(4)]
    return _closure_residual(B, triples)


def is_cayley_plane(B, policy: TolerancePolicy = DEFAULT_POLICY) -> tuple[bool, float]:
    B = np.asarray(B, dtype=float)
    r = cayley_closure_residual(B)
    return r < policy.identity_tol, r


def random_closure_residual(B, rng: np.random.Generator, trials: int = 50) -> float:
    """Closure residual over random (non-orthonormal) triples from the span."""
    B = np.asarray(B, dtype=float)
    coeffs = rng.standard_normal((trials, 3, 4))
    triples = [tuple(c @ B) for c in coeffs]
    return _closure_residual(B, triples)


def cayley_plane_span(e, u, v, policy: TolerancePolicy = DEFAULT_POLICY) -> CayleyPlane:
    e, u, v = (np.asarray(x, dtype=float) for x in (e, u, v))
    if abs(u[0]) > policy.identity_tol or abs(v[0]) > policy.identity_tol:
        raise ValueError("u and v must be imaginary")
    eu = mul(e, u)
    vecs = [e, eu, mul(e, v), mul(eu, v)]
    B = orthonormal_rows(vecs)
    ok, r = is_cayley_plane(B, policy)
    if not ok:
        raise ValueError(f"span is not a Cayley plane (residual {r:.3e})")
    return CayleyPlane(B)


def cayley_product_space(plane: CayleyPlane, rng: np.random.Generator | None = None,
                         checks: int = 5, policy: TolerancePolicy = DEFAULT_POLICY) -> np.ndarray:
    """Orthonormal rows spanning ``X* P`` for ``X`` in the plane ``P``.

    The subspace is computed from the first basis vector and compared, via
    projector distance, with the one obtained from ``checks`` random X in P.
    """
    rng = rng or np.random.default_rng(0)
    B = plane.basis

    def product_space(X):
        return orthonormal_rows(mul(conj(X), B))

    ref = product_space(B[0])
    Pref = ref.T @ ref
    for c in rng.standard_normal((checks, 4)):
        S = product_space(c @ B)
        if np.linalg.norm(S.T @ S - Pref) > policy.identity_tol:
            raise ValueError("X* P depends on X: input is not a Cayley plane")
    return ref


def subspace_distance(A, B) -> float:
    """Frobenius distance between the orthogonal projectors onto row spans."""
    return float(np.linalg.norm(projector(np.asarray(A).T) - projector(np.asarray(B).T)))
