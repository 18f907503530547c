"""Dense complex linear algebra: Hermitian eigensolver, Kronecker products, PSD square root.

All matrices are plain ``numpy.ndarray`` objects with complex (or real) dtype.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import InvalidInputError, NotPSDError

HERMITIAN_RTOL = 1e-12
PSD_FLOOR = -1e-10
_MAX_SWEEPS = 100


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending real eigenvalues and matching unit eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __iter__(self):
        return iter((self.eigenvalues, self.eigenvectors))


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def trace(m: np.ndarray) -> complex:
    return np.trace(m, axis1=-2, axis2=-1)


def is_hermitian(m: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    m = np.asarray(m)
    scale = np.max(np.abs(m)) if m.size else 0.0
    return bool(np.max(np.abs(m - dagger(m)), initial=0.0) <= rtol * scale)


def _check_hermitian(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"matrix must be square, got shape {m.shape}")
    if not is_hermitian(m):
        dev = np.max(np.abs(m - dagger(m)))
        raise InvalidInputError(f"matrix is not Hermitian (max |M - M^dag| = {dev:.3e})")
    return m


def _fix_phase(vecs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rotate each column so its largest-magnitude component is real and positive."""
    mags = np.abs(vecs)
    # first index within rounding of the column maximum, so ties resolve deterministically
    pivot = np.argmax(mags >= mags.max(axis=0) - 1e-12, axis=0)
    cols = np.arange(vecs.shape[1])
    ref = vecs[pivot, cols]
    return vecs * (np.abs(ref) / ref)[None, :], pivot


def hermitian_eig(m: np.ndarray, tol: float = 1e-15) -> EigenDecomposition:
    """Diagonalize a Hermitian matrix with the cyclic complex Jacobi method.

    Each rotation zeroes one off-diagonal pair ``(p, q)`` with the unitary
    ``[[c, s], [-s e^{-i phi}, c e^{-i phi}]]`` acting on columns ``p, q``,
    where ``phi = arg(M[p, q])``. Sweeps repeat until the off-diagonal
    Frobenius norm falls below ``tol * ||M||_F``.

    Eigenvalues are returned ascending. Each eigenvector is phased so its
    largest-magnitude component is real and positive; within a degenerate
    cluster vectors are ordered by the index of that component.
    """
    m = _check_hermitian(m)
    n = m.shape[0]
    a = np.array(m, dtype=complex)
    v = np.eye(n, dtype=complex)
    norm = np.linalg.norm(a)
    if norm == 0.0:
        return EigenDecomposition(np.zeros(n), v)
    threshold = tol * norm

    for _ in range(_MAX_SWEEPS):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= threshold * 1e-3:
                    continue
                phase = apq / r
                app, aqq = a[p, p].real, a[q, q].real
                tau = (aqq - app) / (2.0 * r)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                u = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ u
                a[idx, :] = dagger(u) @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ u
    else:
        raise InvalidInputError("Jacobi iteration did not converge")

    evals = np.real(np.diag(a)).copy()
    v, pivot = _fix_phase(v)
    # sort by eigenvalue, ties (degenerate clusters) broken by pivot index
    cluster_tol = 1e-12 * max(np.max(np.abs(evals)), 1.0)
    order = np.argsort(evals, kind="stable")
    keys = np.empty(n)
    rank = 0
    for k, i in enumerate(order):
        if k > 0 and evals[i] - evals[order[k - 1]] > cluster_tol:
            rank += 1
        keys[i] = rank
    order = np.lexsort((pivot, keys))
    return EigenDecomposition(evals[order], v[:, order])


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; block ``(i, j)`` of the result equals ``a[i, j] * b``."""
    return np.kron(a, b)


def kron_chain(*mats: np.ndarray) -> np.ndarray:
    """Left-associated product ``((m0 (x) m1) (x) m2) ...``."""
    return reduce(np.kron, mats)


def matrix_sqrt_psd(m: np.ndarray) -> np.ndarray:
    """Hermitian PSD square root. Eigenvalues in ``[-1e-10, 0)`` are clamped to zero."""
    evals, vecs = hermitian_eig(m)
    if evals.size and evals[0] < PSD_FLOOR:
        raise NotPSDError(f"matrix is not positive semidefinite (min eigenvalue {evals[0]:.3e})")
    root = np.sqrt(np.clip(evals, 0.0, None))
    s = (vecs * root[None, :]) @ dagger(vecs)
    return 0.5 * (s + dagger(s))
