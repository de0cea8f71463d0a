"""Pure-Python (numpy) fallback for the compiled simplex loop.

Same pivot rule and the same floating-point operations as ``_kernel.pyx``.
"""

from __future__ import annotations

import numpy as np

OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2


def pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    T[row] = T[row] / T[row, col]
    f = T[:, col].copy()
    f[row] = 0.0
    rows = np.flatnonzero(f)
    if rows.size:
        T[rows] = T[rows] - f[rows, None] * T[row]
    basis[row] = col


def simplex_loop(T: np.ndarray, basis: np.ndarray, n_enter: int, tol: float, max_iter: int):
    m = T.shape[0] - 1
    it = 0
    col = -1
    while True:
        improving = np.flatnonzero(T[m, :n_enter] < -tol)
        if improving.size == 0:
            return OPTIMAL, it, -1
        col = int(improving[0])
        if it >= max_iter:
            return ITERATION_LIMIT, it, col
        a = T[:m, col]
        eligible = np.flatnonzero(a > tol)
        if eligible.size == 0:
            return UNBOUNDED, it, col
        ratios = np.maximum(T[eligible, -1], 0.0) / a[eligible]
        theta = ratios.min()
        tied = eligible[ratios <= theta + tol]
        row = int(tied[np.argmin(basis[tied])])
        pivot(T, basis, row, col)
        it += 1
