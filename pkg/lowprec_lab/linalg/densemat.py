"""
Dense matrix kernel.

Mat is a two-dimensional float64 numpy array. Operations never mutate their
inputs. The SVD is a one-sided Jacobi iteration with round-robin pair
ordering, so each round rotates n/2 disjoint column pairs in one vectorised
update; it serves as the oracle behind Muon's exact orthogonalisation.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Sequence, Tuple

import numpy as np

from ..constants import MSIGN_RANK_TOL, NS_COEFFS
from ..errors import DimMismatch, NoConvergence, NonFiniteEntries, ZeroMatrix

Mat = np.ndarray

SVD_MAX_SWEEPS = 60
EIG_MAX_SWEEPS = 100
_EPS = float(np.finfo(np.float64).eps)


class OrthoMethod(str, Enum):
    EXACT_SVD = "exact_svd"
    NEWTON_SCHULZ = "newton_schulz"


# Frobenius-norm slack of ||msign(A)||_F^2 <= r (1 + tol). Newton-Schulz starts
# from A / ||A||_F, whose singular values lie in [0, 1], and the quintic
# 3.4445 x - 4.7750 x^3 + 2.0315 x^5 maps [0, 1.2025] into itself (its maximum
# there is about 1.20237), so 1.2025^2 < 1 + 0.5 after any number of steps.
MSIGN_TOLERANCE = {
    OrthoMethod.EXACT_SVD: 1e-9,
    OrthoMethod.NEWTON_SCHULZ: 0.5,
}


@dataclass(frozen=True)
class SvdResult:
    U: Mat
    S: np.ndarray
    V: Mat
    sweeps: int = 0

    def reconstruct(self) -> Mat:
        return (self.U * self.S) @ self.V.T


def as_mat(A, check_finite: bool = True) -> Mat:
    """Validate and return A as a 2-D float64 array (no copy when possible)."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise DimMismatch(f"expected a non-empty matrix, got shape {A.shape}")
    if check_finite and not np.all(np.isfinite(A)):
        raise NonFiniteEntries(f"matrix of shape {A.shape} has non-finite entries")
    return A


def _same_shape(A: Mat, B: Mat, op: str) -> None:
    if A.shape != B.shape:
        raise DimMismatch(f"{op}: shapes {A.shape} and {B.shape} differ")


def matmul(A: Mat, B: Mat) -> Mat:
    A, B = as_mat(A), as_mat(B)
    if A.shape[1] != B.shape[0]:
        raise DimMismatch(f"matmul: inner dimensions {A.shape} x {B.shape}")
    return A @ B


def add(A: Mat, B: Mat) -> Mat:
    A, B = as_mat(A), as_mat(B)
    _same_shape(A, B, "add")
    return A + B


def scale(A: Mat, c: float) -> Mat:
    return float(c) * as_mat(A)


def transpose(A: Mat) -> Mat:
    return as_mat(A).T.copy()


def hadamard(A: Mat, B: Mat) -> Mat:
    A, B = as_mat(A), as_mat(B)
    _same_shape(A, B, "hadamard")
    return A * B


def elementwise_map(A: Mat, fn: Callable[[np.ndarray], np.ndarray]) -> Mat:
    """Apply a vectorised function entrywise; the result must keep A's shape."""
    A = as_mat(A)
    out = np.asarray(fn(A.copy()), dtype=np.float64)
    _same_shape(A, out, "elementwise_map")
    return out


def frob_norm(A: Mat) -> float:
    A = np.asarray(A, dtype=np.float64)
    return float(np.sqrt(np.sum(A * A)))


def nuclear_norm(A: Mat) -> float:
    return float(np.sum(jacobi_svd(A).S))


def spectral_norm(A: Mat) -> float:
    return float(jacobi_svd(A).S[0])


def _round_robin(n: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Circle-method schedule: n - 1 rounds of n / 2 disjoint pairs (n even)."""
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        half = n // 2
        ps = np.array(players[:half])
        qs = np.array(players[half:][::-1])
        rounds.append((np.minimum(ps, qs), np.maximum(ps, qs)))
        players = [players[0], players[-1], *players[1:-1]]
    return rounds


def _complete_columns(U: Mat, good: np.ndarray) -> Mat:
    """Replace columns outside `good` with an orthonormal completion."""
    m, r = U.shape
    basis = [U[:, j] for j in range(r) if good[j]]
    candidates = iter(np.eye(m))
    out = U.copy()
    for j in range(r):
        if good[j]:
            continue
        for e in candidates:
            v = e.copy()
            for _ in range(2):
                for b in basis:
                    v -= (b @ v) * b
            norm = np.linalg.norm(v)
            if norm > 0.5:
                v /= norm
                basis.append(v)
                out[:, j] = v
                break
    return out


def jacobi_svd(A: Mat, max_sweeps: int = SVD_MAX_SWEEPS) -> SvdResult:
    """
    Thin SVD A = U diag(S) V^T by one-sided Jacobi.

    Intended for oracle-scale inputs (both sides at most 512). S is sorted
    non-increasing; U columns for zero singular values are completed to an
    orthonormal set.

    Raises:
        NoConvergence: If a sweep still rotates after `max_sweeps` sweeps
    """
    A = as_mat(A)
    transposed = A.shape[0] < A.shape[1]
    work = A.T.copy() if transposed else A.copy()
    m, n = work.shape

    padded = n + (n % 2)
    if padded != n:
        work = np.hstack([work, np.zeros((m, 1))])
    V = np.eye(padded)
    tol = 10.0 * m * _EPS
    rounds = _round_robin(padded)

    sweeps = 0
    converged = padded < 2
    while not converged:
        if sweeps >= max_sweeps:
            raise NoConvergence("one-sided Jacobi SVD", sweeps)
        sweeps += 1
        rotated = False
        for ps, qs in rounds:
            up, uq = work[:, ps], work[:, qs]
            alpha = np.sum(up * up, axis=0)
            beta = np.sum(uq * uq, axis=0)
            gamma = np.sum(up * uq, axis=0)
            active = np.abs(gamma) > tol * np.sqrt(alpha * beta)
            if not active.any():
                continue
            rotated = True
            safe_gamma = np.where(active, gamma, 1.0)
            zeta = (beta - alpha) / (2.0 * safe_gamma)
            t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta))
            c = np.where(active, 1.0 / np.sqrt(1.0 + t * t), 1.0)
            s = np.where(active, c * t, 0.0)

            work[:, ps], work[:, qs] = c * up - s * uq, s * up + c * uq
            vp, vq = V[:, ps], V[:, qs]
            V[:, ps], V[:, qs] = c * vp - s * vq, s * vp + c * vq
        converged = not rotated

    work, V = work[:, :n], V[:n, :n]
    S = np.sqrt(np.sum(work * work, axis=0))
    order = np.argsort(-S, kind="stable")
    S, work, V = S[order], work[:, order], V[:, order]

    smax = S[0] if S.size else 0.0
    good = S > smax * _EPS if smax > 0 else np.zeros(n, dtype=bool)
    U = np.zeros_like(work)
    U[:, good] = work[:, good] / S[good]
    if not good.all():
        U = _complete_columns(U, good)

    if transposed:
        return SvdResult(U=V, S=S, V=U, sweeps=sweeps)
    return SvdResult(U=U, S=S, V=V, sweeps=sweeps)


def symmetric_jacobi_eigvalsh(S: Mat, max_sweeps: int = EIG_MAX_SWEEPS) -> np.ndarray:
    """
    Eigenvalues of a symmetric matrix by cyclic two-sided Jacobi, sorted descending.

    Independent of jacobi_svd; tests use it as a second oracle.
    """
    A = as_mat(S).copy()
    n = A.shape[0]
    if A.shape[1] != n:
        raise DimMismatch(f"expected a square matrix, got {A.shape}")
    scale_ = frob_norm(A)
    if not np.allclose(A, A.T, rtol=0.0, atol=1e-12 * max(1.0, scale_)):
        raise ValueError("symmetric_jacobi_eigvalsh needs a symmetric matrix")

    threshold = 8.0 * n * _EPS * scale_
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(A[p, q]) <= threshold:
                    continue
                rotated = True
                theta = (A[q, q] - A[p, p]) / (2.0 * A[p, q])
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                col_p, col_q = A[:, p].copy(), A[:, q].copy()
                A[:, p], A[:, q] = c * col_p - s * col_q, s * col_p + c * col_q
                row_p, row_q = A[p, :].copy(), A[q, :].copy()
                A[p, :], A[q, :] = c * row_p - s * row_q, s * row_p + c * row_q
                A[p, q] = A[q, p] = 0.0
        if not rotated:
            return np.sort(np.diag(A))[::-1].copy()
    raise NoConvergence("symmetric Jacobi eigenvalues", max_sweeps)


def _newton_schulz(A: Mat, steps: int, coeffs: Sequence[float]) -> Mat:
    a, b, c = coeffs
    X = A / frob_norm(A)
    transpose_back = X.shape[0] > X.shape[1]
    if transpose_back:
        X = X.T
    for _ in range(steps):
        G = X @ X.T
        B = b * G + c * (G @ G)
        X = a * X + B @ X
    return X.T.copy() if transpose_back else X


def msign(A: Mat, method: OrthoMethod = OrthoMethod.EXACT_SVD, ns_iters: int = 10,
          ns_coeffs: Sequence[float] = NS_COEFFS) -> Mat:
    """
    Orthogonal factor U V^T of A.

    ExactSvd keeps singular directions with sigma >= sigma_max * 1e-12 and
    returns a partial isometry. NewtonSchulz runs `ns_iters` quintic steps on
    A / ||A||_F.

    Raises:
        ZeroMatrix: If A is zero
    """
    A = as_mat(A)
    if frob_norm(A) == 0.0:
        raise ZeroMatrix(f"msign of a zero {A.shape[0]}x{A.shape[1]} matrix")

    method = OrthoMethod(method)
    if method is OrthoMethod.NEWTON_SCHULZ:
        if ns_iters < 0:
            raise ValueError(f"ns_iters must be >= 0, got {ns_iters}")
        if len(ns_coeffs) != 3:
            raise ValueError(f"ns_coeffs needs three values, got {list(ns_coeffs)}")
        return _newton_schulz(A, ns_iters, ns_coeffs)

    svd = jacobi_svd(A)
    keep = svd.S >= svd.S[0] * MSIGN_RANK_TOL
    return svd.U[:, keep] @ svd.V[:, keep].T


def msign_tolerance(method: OrthoMethod) -> float:
    return MSIGN_TOLERANCE[OrthoMethod(method)]
