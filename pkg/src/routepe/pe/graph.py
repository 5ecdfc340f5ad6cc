"""Spectral and random-walk encoders on the route graph."""

from __future__ import annotations

import numpy as np

from ..core import Instance, Solution
from ..errors import NumericalError

RESIDUAL_TOL = 1e-8


def route_adjacency(inst: Instance, sol: Solution) -> np.ndarray:
    """Weighted adjacency counting arc traversals (a 1-customer route gives weight 2)."""
    A = np.zeros((inst.n_nodes, inst.n_nodes))
    for r in sol.routes:
        for k in range(len(r) - 1):
            u, v = r[k], r[k + 1]
            A[u, v] += 1.0
            A[v, u] += 1.0
    return A


def laplacian_eigenpairs(A: np.ndarray, name: str = "") -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenpairs of L = D - A with a residual check."""
    L = np.diag(A.sum(axis=1)) - A
    try:
        vals, vecs = np.linalg.eigh(L)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed on {name or 'graph'}: {exc}") from exc
    resid = np.abs(L @ vecs - vecs * vals).max() if len(vals) else 0.0
    if not resid < RESIDUAL_TOL:
        raise NumericalError(f"eigenpair residual {resid:.3g} on {name or 'graph'}")
    return vals, vecs


def laplacian_pe(A: np.ndarray, k: int, signs: np.ndarray, name: str = "") -> np.ndarray:
    """The ``k`` smallest non-trivial eigenvectors, sign-flipped, zero-padded to k columns.

    Isolated nodes (zero rows of ``A`` other than within a connected
    component containing node 0) are excluded from the decomposition and
    get zero rows.
    """
    n = len(A)
    keep = np.flatnonzero((A.sum(axis=1) > 0) | (np.arange(n) == 0))
    out = np.zeros((n, k))
    if len(keep) < 2:
        return out
    _, vecs = laplacian_eigenpairs(A[np.ix_(keep, keep)], name)
    take = vecs[:, 1:k + 1]
    out[keep, :take.shape[1]] = take * signs[:take.shape[1]]
    return out


def rwse(A: np.ndarray, k: int) -> np.ndarray:
    """[(R^j)_vv] for j = 1..k with R = D^-1 A; isolated nodes give zeros."""
    deg = A.sum(axis=1)
    R = np.divide(A, deg[:, None], out=np.zeros_like(A), where=deg[:, None] > 0)
    out = np.empty((len(A), k))
    P = np.eye(len(A))
    for j in range(k):
        P = P @ R
        out[:, j] = np.diag(P)
    return out
