"""Lawson-Hanson active-set solver for ``min ||Ax - b||^2  s.t.  x >= 0``."""
from __future__ import annotations

import numpy as np

from .errors import IterationLimit


def nnls(A, b, max_iter: int | None = None) -> np.ndarray:
    """Non-negative least squares.

    Parameters
    ----------
    A : ndarray of shape (n, m)
    b : ndarray of shape (n,)
    max_iter : int, optional
        Cap on outer (variable-admitting) iterations. Defaults to ``3 * m``.

    Returns
    -------
    x : ndarray of shape (m,)
        The minimizer, every entry ``>= 0``.

    References
    ----------
    Lawson C., Hanson R.J. (1974), Solving Least Squares Problems, ch. 23.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).ravel()
    if A.ndim != 2 or A.shape[0] != b.shape[0]:
        raise ValueError(f"incompatible shapes {A.shape} and {b.shape}")
    n, m = A.shape
    if n < 1 or m < 1:
        raise ValueError("A must be non-empty")
    if max_iter is None:
        max_iter = 3 * m

    scale = np.abs(A).sum(axis=0).max() * max(np.abs(b).max(), 1e-300)
    tol = 10 * max(n, m) * np.finfo(float).eps * scale

    x = np.zeros(m)
    passive = np.zeros(m, dtype=bool)
    w = A.T @ (b - A @ x)
    it = 0
    while (~passive).any() and w[~passive].max() > tol:
        if it >= max_iter:
            raise IterationLimit(f"no convergence after {max_iter} iterations")
        it += 1
        free = np.where(~passive)[0]
        passive[free[np.argmax(w[free])]] = True

        s = _restricted_lstsq(A, b, passive)
        # inner loop: step back toward feasibility, dropping variables that hit zero
        while passive.any() and s[passive].min() <= 0:
            idx = np.where(passive & (s <= 0))[0]
            ratios = x[idx] / (x[idx] - s[idx])
            alpha = ratios.min()
            x = x + alpha * (s - x)
            x[idx[ratios <= alpha]] = 0.0
            passive &= x > 0
            x[~passive] = 0.0
            s = _restricted_lstsq(A, b, passive)
        x = s
        w = A.T @ (b - A @ x)
    return x


def _restricted_lstsq(A, b, passive):
    s = np.zeros(A.shape[1])
    if passive.any():
        s[passive] = np.linalg.lstsq(A[:, passive], b, rcond=None)[0]
    return s


def kkt_residuals(A, b, x) -> tuple[float, float, float]:
    """Return ``(min x, max |g_i| on the support, max(-g_i) off the support)`` with ``g = A^T(Ax-b)``."""
    A = np.asarray(A, dtype=float)
    x = np.asarray(x, dtype=float)
    g = A.T @ (A @ x - np.asarray(b, dtype=float))
    support = x > 0
    on = float(np.max(np.abs(g[support]))) if support.any() else 0.0
    off = float(np.max(-g[~support])) if (~support).any() else 0.0
    return float(x.min()), on, max(off, 0.0)
