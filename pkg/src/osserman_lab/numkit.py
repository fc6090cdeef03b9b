"""Small dense linear algebra used throughout the package.

Operators are plain ``numpy`` arrays.  ``sym`` and ``skew`` project onto
the symmetric / skew-symmetric parts, so every operator built here is
exactly (anti)symmetric.  The eigensolver is a cyclic Jacobi method with
a fixed round-robin ordering: it is bit-reproducible and does not depend
on LAPACK thread scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_DIM = 32
MAX_SWEEPS = 60


class ConvergenceError(RuntimeError):
    """Jacobi iteration did not reach the off-diagonal threshold."""


@dataclass(frozen=True)
class TolerancePolicy:
    eig_tol: float = 1e-12
    cluster_tol: float = 1e-7
    identity_tol: float = 1e-10
    fd_tol: float = 1e-4

    def __post_init__(self):
        for name in ("eig_tol", "cluster_tol", "identity_tol", "fd_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    def with_cluster_tol(self, tol: float) -> "TolerancePolicy":
        return TolerancePolicy(self.eig_tol, tol, self.identity_tol, self.fd_tol)

    def to_dict(self) -> dict:
        return {
            "eig_tol": self.eig_tol,
            "cluster_tol": self.cluster_tol,
            "identity_tol": self.identity_tol,
            "fd_tol": self.fd_tol,
        }


DEFAULT_POLICY = TolerancePolicy()


@dataclass(frozen=True)
class Spectrum:
    """Sorted eigenvalue clusters ``[(value, multiplicity), ...]``."""

    clusters: tuple[tuple[float, int], ...]
    cluster_tol: float
    values: np.ndarray = field(repr=False, compare=False, default=None)

    @property
    def n(self) -> int:
        return sum(m for _, m in self.clusters)

    @property
    def multiplicities(self) -> dict[float, int]:
        return {v: m for v, m in self.clusters}

    def matches(self, expected, tol: float) -> bool:
        """Compare with ``[(value, mult), ...]`` (any order, values within ``tol``)."""
        exp = sorted(expected)
        if len(exp) != len(self.clusters):
            return False
        return all(
            m == em and abs(v - ev) <= tol
            for (v, m), (ev, em) in zip(self.clusters, exp)
        )

    def to_dict(self) -> dict:
        return {
            "clusters": [[v, m] for v, m in self.clusters],
            "cluster_tol": self.cluster_tol,
        }


def sym(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    return 0.5 * (M + M.T)


def skew(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    return 0.5 * (M - M.T)


def wedge(X, Y) -> np.ndarray:
    """Matrix of the operator ``Z -> <X,Z> Y - <Y,Z> X``."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape != Y.shape:
        raise ValueError("dimension mismatch")
    return np.outer(Y, X) - np.outer(X, Y)


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def random_unit(rng: np.random.Generator, n: int, size: int | None = None) -> np.ndarray:
    if size is None:
        return unit(rng.standard_normal(n))
    V = rng.standard_normal((size, n))
    return V / np.linalg.norm(V, axis=1, keepdims=True)


def random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    # QR with sign fix gives Haar measure
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


def random_symmetric(rng: np.random.Generator, n: int) -> np.ndarray:
    return sym(rng.standard_normal((n, n)))


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Disjoint pair sets covering every (p, q) once per sweep (circle method)."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for k in range(m // 2):
            a, b = players[k], players[m - 1 - k]
            if a < n and b < n:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=int), np.array(qs, dtype=int)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


_ROUNDS_CACHE: dict[int, list] = {}


def jacobi_eigh(M, tol: float = 1e-18) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of one symmetric matrix or a stack ``(..., n, n)``.

    Returns ascending eigenvalues ``w`` and orthonormal eigenvectors as the
    columns of ``V`` so that ``M = V diag(w) V^T``.
    """
    A = np.array(M, dtype=float)
    single = A.ndim == 2
    if single:
        A = A[None]
    batch_shape = A.shape[:-2]
    n = A.shape[-1]
    if A.shape[-2] != n:
        raise ValueError("matrix must be square")
    if n > MAX_DIM:
        raise ValueError(f"dimension {n} exceeds {MAX_DIM}")
    A = A.reshape(-1, n, n)
    A = 0.5 * (A + A.transpose(0, 2, 1))
    B = A.shape[0]
    V = np.broadcast_to(np.eye(n), (B, n, n)).copy()
    if n > 1:
        rounds = _ROUNDS_CACHE.setdefault(n, _round_robin(n))
        scale = np.sqrt(np.sum(A * A, axis=(1, 2)))
        floor = (tol * scale)[:, None]
        eps = np.finfo(float).eps
        for _sweep in range(MAX_SWEEPS):
            rotated = False
            for p, q in rounds:
                app = A[:, p, p]
                aqq = A[:, q, q]
                apq = A[:, p, q]
                active = np.abs(apq) > np.maximum(eps * np.sqrt(np.abs(app * aqq)), floor)
                if not active.any():
                    continue
                rotated = True
                safe = np.where(active, apq, 1.0)
                theta = np.where(active, (aqq - app) / (2.0 * safe), 0.0)
                sgn = np.where(theta >= 0, 1.0, -1.0)
                big = np.abs(theta) > 1e150
                t = np.where(
                    big,
                    0.5 / np.where(big, theta, 1.0),
                    sgn / (np.abs(theta) + np.sqrt(np.where(big, 0.0, theta) ** 2 + 1.0)),
                )
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                cb = c[:, :, None]
                sb = s[:, :, None]
                Ap = A[:, p, :].copy()
                Aq = A[:, q, :]
                A[:, p, :] = cb * Ap - sb * Aq
                A[:, q, :] = sb * Ap + cb * Aq
                cc = c[:, None, :]
                sc = s[:, None, :]
                Ap = A[:, :, p].copy()
                Aq = A[:, :, q]
                A[:, :, p] = Ap * cc - Aq * sc
                A[:, :, q] = Ap * sc + Aq * cc
                # annihilated entries are set exactly
                A[:, p, q] = np.where(active, 0.0, A[:, p, q])
                A[:, q, p] = A[:, p, q]
                Vp = V[:, :, p].copy()
                Vq = V[:, :, q]
                V[:, :, p] = Vp * cc - Vq * sc
                V[:, :, q] = Vp * sc + Vq * cc
            if not rotated:
                break
        else:
            raise ConvergenceError(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")
    w = np.diagonal(A, axis1=1, axis2=2).copy()
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    V = np.take_along_axis(V, order[:, None, :], axis=2)
    w = w.reshape(batch_shape + (n,))
    V = V.reshape(batch_shape + (n, n))
    if single:
        return w[0], V[0]
    return w, V


def cluster(values, tol: float) -> tuple[tuple[float, int], ...]:
    """Single-linkage clustering of sorted values with absolute gap ``tol``."""
    vals = np.sort(np.asarray(values, dtype=float))
    if vals.size == 0:
        return ()
    groups = [[vals[0]]]
    for v in vals[1:]:
        if v - groups[-1][-1] <= tol:
            groups[-1].append(v)
        else:
            groups.append([v])
    return tuple((float(np.mean(g)), len(g)) for g in groups)


def cluster_indices(values, tol: float) -> list[np.ndarray]:
    """Index groups of ascending ``values`` under the same single-linkage rule."""
    vals = np.asarray(values, dtype=float)
    groups = [[0]] if vals.size else []
    for i in range(1, vals.size):
        if vals[i] - vals[i - 1] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return [np.array(g) for g in groups]


def sym_eig(M, policy: TolerancePolicy = DEFAULT_POLICY) -> Spectrum:
    M = sym(M)
    w, V = jacobi_eigh(M)
    norm = np.linalg.norm(M)
    resid = np.linalg.norm(M - (V * w) @ V.T)
    if resid > max(policy.eig_tol * norm, 1e-300) and resid > 64 * np.finfo(float).eps * norm:
        raise ConvergenceError(f"reconstruction residual {resid:.3e} exceeds tolerance")
    return Spectrum(cluster(w, policy.cluster_tol), policy.cluster_tol, values=w)


def eigenspaces(M, tol: float) -> list[np.ndarray]:
    """Orthonormal bases (columns) of the clustered eigenspaces of symmetric ``M``."""
    w, V = jacobi_eigh(sym(M))
    return [V[:, idx] for idx in cluster_indices(w, tol)]


def projector(basis) -> np.ndarray:
    """Orthogonal projector onto the column span of ``basis`` (orthonormalized first)."""
    Q, _ = np.linalg.qr(np.asarray(basis, dtype=float))
    return Q @ Q.T


def sqrt_inv_psd(S) -> np.ndarray:
    w, V = jacobi_eigh(S)
    if w[0] <= 0:
        raise np.linalg.LinAlgError("matrix is not positive definite")
    return (V / np.sqrt(w)) @ V.T


def null_space(A, rtol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis of ker(A) as columns (via SVD)."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    _, s, Vt = np.linalg.svd(A)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > rtol * max(smax, 1.0)))
    return Vt[rank:].T.copy()


