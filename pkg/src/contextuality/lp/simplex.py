"""Two-phase dense simplex with Bland's rule, in float and exact-rational modes.

Float mode runs the selected kernel (compiled or numpy) on a float64
tableau. Exact mode first asks the float solver for a candidate basis and
certifies it in rational arithmetic (primal feasibility and reduced-cost
signs); if the certificate fails it falls back to a from-scratch exact
simplex that pivots a scaled integer tableau (Edmonds' integer-preserving
update, every division exact).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np

from . import kernel
from .problem import LpError, LpProblem, LpSolution, Status, to_fraction

DEFAULT_EPS = 1e-7
PIVOT_TOL = 1e-9


def _is_neg_inf(v: Any) -> bool:
    return isinstance(v, (float, np.floating)) and math.isinf(v) and v < 0


def _is_pos_inf(v: Any) -> bool:
    return isinstance(v, (float, np.floating)) and math.isinf(v) and v > 0


@dataclass
class _StandardForm:
    """``min c.x' s.t. A x' = b, x' >= 0`` plus the map back to the user's variables."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    const: Any
    offset: list
    pos: list[int]
    neg: list[int]
    n_user_rows: int

    def recover(self, xs: np.ndarray) -> np.ndarray:
        out = np.empty(len(self.offset), dtype=xs.dtype)
        for j, off in enumerate(self.offset):
            v = off
            if self.pos[j] >= 0:
                v = v + xs[self.pos[j]]
            if self.neg[j] >= 0:
                v = v - xs[self.neg[j]]
            out[j] = v
        return out

    def recover_direction(self, ds: np.ndarray) -> np.ndarray:
        zero = ds.dtype.type(0) if ds.dtype != object else Fraction(0)
        out = np.empty(len(self.offset), dtype=ds.dtype)
        for j in range(len(self.offset)):
            v = zero
            if self.pos[j] >= 0:
                v = v + ds[self.pos[j]]
            if self.neg[j] >= 0:
                v = v - ds[self.neg[j]]
            out[j] = v
        return out


def _standard_form(problem: LpProblem, exact: bool) -> _StandardForm:
    c, A, b = problem.arrays(exact)
    lo, hi = problem.bounds()
    m, n = A.shape
    zero = Fraction(0) if exact else 0.0
    num = to_fraction if exact else float

    cols: list[np.ndarray] = []
    costs: list[Any] = []
    offset: list[Any] = []
    pos = [-1] * n
    neg = [-1] * n
    upper_rows: list[tuple[int, Any]] = []
    for j in range(n):
        lj, hj = lo[j], hi[j]
        if not _is_neg_inf(lj):
            lj = num(lj)
            offset.append(lj)
            pos[j] = len(cols)
            cols.append(A[:, j])
            costs.append(c[j])
            if not _is_pos_inf(hj):
                upper_rows.append((pos[j], num(hj) - lj))
        elif not _is_pos_inf(hj):
            offset.append(num(hj))
            neg[j] = len(cols)
            cols.append(-A[:, j])
            costs.append(-c[j])
        else:
            offset.append(zero)
            pos[j] = len(cols)
            cols.append(A[:, j])
            costs.append(c[j])
            neg[j] = len(cols)
            cols.append(-A[:, j])
            costs.append(-c[j])

    n_std = len(cols) + len(upper_rows)
    dtype = object if exact else np.float64
    S = np.empty((m + len(upper_rows), n_std), dtype=dtype)
    S[...] = zero
    for k, col in enumerate(cols):
        S[:m, k] = col
    off = np.array(offset, dtype=dtype)
    rhs = np.empty(m + len(upper_rows), dtype=dtype)
    rhs[:m] = b - (A.dot(off) if n else np.zeros(m, dtype=dtype))
    for r, (k, width) in enumerate(upper_rows):
        S[m + r, k] = 1
        S[m + r, len(cols) + r] = 1
        rhs[m + r] = width
    cost = np.empty(n_std, dtype=dtype)
    cost[...] = zero
    cost[: len(cols)] = costs
    const = c.dot(off) if n else zero
    return _StandardForm(S, rhs, cost, const, offset, pos, neg, m)


# ---------------------------------------------------------------------------
# float path


@dataclass
class _FloatRun:
    status: Status
    x: np.ndarray | None
    y: np.ndarray | None
    ray: np.ndarray | None
    residual: float
    iterations: int
    phase1_basis: tuple[int, ...]
    basis: tuple[int, ...]


def _max_iter(m: int, n: int) -> int:
    return 200 * (m + n) + 10_000


def _float_two_phase(A: np.ndarray, b: np.ndarray, c: np.ndarray, eps: float,
                     tol: float = PIVOT_TOL, loop=None, pivot=None) -> _FloatRun:
    loop = loop or kernel.simplex_loop
    pivot = pivot or kernel.pivot
    m, n = A.shape
    sign = np.where(b < 0, -1.0, 1.0)
    T = np.zeros((m + 1, n + m + 1), dtype=np.float64)
    T[:m, :n] = A * sign[:, None]
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b * sign
    T[m, :n] = -T[:m, :n].sum(axis=0)
    T[m, -1] = -T[:m, -1].sum()
    basis = np.arange(n, n + m, dtype=np.int64)
    limit = _max_iter(m, n)

    status, it1, _ = loop(T, basis, n, tol, limit)
    if status == kernel.ITERATION_LIMIT:
        raise LpError("phase one hit the iteration limit")
    residual = max(-T[m, -1], 0.0)
    phase1_basis = tuple(int(v) for v in basis)
    if residual > eps:
        y = sign * (1.0 - T[m, n:n + m])
        return _FloatRun(Status.INFEASIBLE, None, y, None, residual, it1, phase1_basis, phase1_basis)

    for i in range(m):
        if basis[i] >= n:
            candidates = np.flatnonzero(np.abs(T[i, :n]) > tol)
            if candidates.size:
                pivot(T, basis, i, int(candidates[0]))

    cost = np.concatenate([c, np.zeros(m)])
    cb = cost[basis]
    T[m, :-1] = cost - cb @ T[:m, :-1]
    T[m, -1] = -(cb @ T[:m, -1])
    status, it2, col = loop(T, basis, n, tol, limit)
    if status == kernel.ITERATION_LIMIT:
        raise LpError("phase two hit the iteration limit")
    xs = np.zeros(n + m)
    xs[basis] = T[:m, -1]
    final_basis = tuple(int(v) for v in basis)
    if status == kernel.UNBOUNDED:
        d = np.zeros(n + m)
        d[col] = 1.0
        d[basis] -= T[:m, col]
        return _FloatRun(Status.UNBOUNDED, xs[:n], None, d[:n], residual, it1 + it2,
                         phase1_basis, final_basis)
    y = sign * (-T[m, n:n + m])
    return _FloatRun(Status.OPTIMAL, xs[:n], y, None, residual, it1 + it2, phase1_basis, final_basis)


# ---------------------------------------------------------------------------
# exact path


def _lcm_denominators(values) -> int:
    out = 1
    for v in values:
        d = v.denominator
        if d != 1:
            out = out * d // math.gcd(out, d)
    return out


def _fraction_solve(M: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Solve ``M x = rhs`` by Gauss-Jordan elimination; None when singular."""
    n = len(M)
    aug = [list(row) + [r] for row, r in zip(M, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        row = [v / p for v in aug[col]]
        aug[col] = row
        nz = [j for j, v in enumerate(row) if v != 0]
        for r in range(n):
            if r != col:
                f = aug[r][col]
                if f != 0:
                    target = aug[r]
                    for j in nz:
                        target[j] -= f * row[j]
    return [aug[r][n] for r in range(n)]


class _IntegerSystem:
    """``A x + a = b`` scaled to integers, rows sign-normalized so ``b >= 0``."""

    def __init__(self, A: np.ndarray, b: np.ndarray, c: np.ndarray):
        m, n = A.shape
        self.m, self.n = m, n
        self.sign = [(-1 if b[i] < 0 else 1) for i in range(m)]
        scale = _lcm_denominators(list(A.ravel()) + list(b))
        self.scale = scale
        Ai = np.empty((m, n), dtype=object)
        bi = np.empty(m, dtype=object)
        for i in range(m):
            s = self.sign[i] * scale
            for j in range(n):
                v = A[i, j] * s
                Ai[i, j] = v.numerator
            bi[i] = (b[i] * s).numerator
        self.A = Ai
        self.b = bi
        self.c = c
        self.c_scale = _lcm_denominators(list(c)) if n else 1
        self.c_int = np.array([(v * self.c_scale).numerator for v in c], dtype=object)

    def column(self, j: int) -> list[int]:
        if j < self.n:
            return list(self.A[:, j])
        col = [0] * self.m
        col[j - self.n] = 1
        return col

    def original_multipliers(self, y_scaled) -> np.ndarray:
        return np.array([Fraction(self.sign[i] * self.scale) * y_scaled[i] for i in range(self.m)],
                        dtype=object)


@dataclass
class _ExactRun:
    status: Status
    x: np.ndarray | None
    y: np.ndarray | None
    ray: np.ndarray | None
    residual: Fraction
    iterations: int
    basis: tuple[int, ...]


def _certify_basis(sys: _IntegerSystem, basis: tuple[int, ...], phase: int) -> _ExactRun | None:
    """Exactly re-check a basis reported by the float solver.

    ``phase=1`` certifies a positive phase-one optimum (infeasibility),
    ``phase=2`` an optimal solution of the original costs.
    """
    m, n = sys.m, sys.n
    if len(basis) != m or len(set(basis)) != m:
        return None
    cols = [sys.column(j) for j in basis]
    B = [[Fraction(cols[k][i]) for k in range(m)] for i in range(m)]
    xb = _fraction_solve(B, [Fraction(v) for v in sys.b])
    if xb is None or any(v < 0 for v in xb):
        return None
    if phase == 1:
        cb = [Fraction(1) if j >= n else Fraction(0) for j in basis]
        cost_int = np.zeros(n, dtype=object)
        cost_scale = 1
    else:
        if any(basis[k] >= n and xb[k] != 0 for k in range(m)):
            return None
        cb = [sys.c[j] if j < n else Fraction(0) for j in basis]
        cost_int = sys.c_int
        cost_scale = sys.c_scale
    Bt = [[B[k][i] for k in range(m)] for i in range(m)]
    y = _fraction_solve(Bt, cb)
    if y is None:
        return None
    ly = _lcm_denominators(y)
    Y = np.array([(v * ly).numerator for v in y], dtype=object)
    AtY = Y.dot(sys.A) if m else np.zeros(n, dtype=object)
    # reduced cost r_j = c_j - y.A_j  >= 0   <=>   c_int_j * ly >= cost_scale * (A^T Y)_j
    lhs = cost_int * ly
    rhs = AtY * cost_scale
    if n and any(lhs[j] < rhs[j] for j in range(n)):
        return None
    xs = np.array([Fraction(0)] * (n + m), dtype=object)
    for k, j in enumerate(basis):
        xs[j] = xb[k]
    if phase == 1:
        residual = sum((xb[k] for k in range(m) if basis[k] >= n), Fraction(0))
        if residual == 0:
            return None
        return _ExactRun(Status.INFEASIBLE, None, sys.original_multipliers(y), None, residual, 0, basis)
    return _ExactRun(Status.OPTIMAL, xs[:n], sys.original_multipliers(y), None, Fraction(0), 0, basis)


def _int_pivot(M: np.ndarray, d: int, r: int, col: int) -> int:
    p = M[r, col]
    prow = M[r].copy()
    f = M[:, col].copy()
    others = np.ones(M.shape[0], dtype=bool)
    others[r] = False
    M[others] = (M[others] * p - np.outer(f[others], prow)) // d
    if p < 0:
        M *= -1
        p = -p
    return p


def _exact_two_phase(sys: _IntegerSystem) -> _ExactRun:
    m, n = sys.m, sys.n
    M = np.zeros((m + 1, n + m + 1), dtype=object)
    M[:m, :n] = sys.A
    for i in range(m):
        M[i, n + i] = 1
    M[:m, -1] = sys.b
    M[m, :n] = -M[:m, :n].sum(axis=0) if m else 0
    M[m, -1] = -sum(sys.b) if m else 0
    basis = list(range(n, n + m))
    d = 1
    iterations = 0

    def run(n_enter: int):
        nonlocal d, iterations
        while True:
            obj = M[m]
            col = next((j for j in range(n_enter) if obj[j] < 0), -1)
            if col < 0:
                return None
            best = None
            row = -1
            for i in range(m):
                a = M[i, col]
                if a > 0:
                    ratio = Fraction(M[i, -1], a)
                    if best is None or ratio < best or (ratio == best and basis[i] < basis[row]):
                        best, row = ratio, i
            if row < 0:
                return col
            d = _int_pivot(M, d, row, col)
            basis[row] = col
            iterations += 1

    run(n)
    residual = Fraction(-M[m, -1], d)
    if residual > 0:
        y_scaled = [1 - Fraction(M[m, n + k], d) for k in range(m)]
        return _ExactRun(Status.INFEASIBLE, None, sys.original_multipliers(y_scaled), None,
                         residual, iterations, tuple(basis))

    for i in range(m):
        if basis[i] >= n:
            j = next((j for j in range(n) if M[i, j] != 0), -1)
            if j >= 0:
                d = _int_pivot(M, d, i, j)
                basis[i] = j

    cost = list(sys.c_int) + [0] * m
    obj = M[m]
    for j in range(n + m):
        obj[j] = cost[j] * d
    obj[-1] = 0
    for i in range(m):
        cb = cost[basis[i]]
        if cb:
            obj -= cb * M[i]
    M[m] = obj

    col = run(n)
    xs = np.array([Fraction(0)] * (n + m), dtype=object)
    for i in range(m):
        xs[basis[i]] = Fraction(M[i, -1], d)
    if col is not None:
        ray = np.array([Fraction(0)] * (n + m), dtype=object)
        ray[col] = Fraction(1)
        for i in range(m):
            ray[basis[i]] -= Fraction(M[i, col], d)
        return _ExactRun(Status.UNBOUNDED, xs[:n], None, ray[:n], Fraction(0), iterations, tuple(basis))
    denom = d * sys.c_scale
    y_scaled = [-Fraction(M[m, n + k], denom) for k in range(m)]
    return _ExactRun(Status.OPTIMAL, xs[:n], sys.original_multipliers(y_scaled), None,
                     Fraction(0), iterations, tuple(basis))


# ---------------------------------------------------------------------------
# public API


def solve(problem: LpProblem, exact: bool = False, eps: float = DEFAULT_EPS) -> LpSolution:
    """Solve ``problem``; see :class:`LpProblem` for the form.

    In float mode a problem whose phase-one residual (the l1 norm of the
    equality violation) is within ``eps`` counts as feasible. Exact mode
    ignores ``eps`` and decides every comparison in rational arithmetic.
    """
    if exact:
        return _solve_exact(problem, eps)
    std = _standard_form(problem, exact=False)
    run = _float_two_phase(std.A, std.b, std.c, eps)
    m = std.n_user_rows
    if run.status is Status.INFEASIBLE:
        return LpSolution(Status.INFEASIBLE, None, None, run.y[:m], None, False, run.iterations,
                          run.residual, run.phase1_basis)
    x = std.recover(run.x)
    if run.status is Status.UNBOUNDED:
        return LpSolution(Status.UNBOUNDED, -np.inf, x, None, std.recover_direction(run.ray), False,
                          run.iterations, run.residual, run.basis)
    value = float(std.c @ run.x + std.const)
    return LpSolution(Status.OPTIMAL, value, x, run.y[:m], None, False, run.iterations,
                      run.residual, run.basis)


def _solve_exact(problem: LpProblem, eps: float) -> LpSolution:
    std = _standard_form(problem, exact=True)
    sys = _IntegerSystem(std.A, std.b, std.c)
    run: _ExactRun | None = None
    float_A = np.array(std.A, dtype=np.float64)
    float_b = np.array(std.b, dtype=np.float64)
    float_c = np.array(std.c, dtype=np.float64)
    try:
        hint = _float_two_phase(float_A, float_b, float_c, eps=1e-12)
    except LpError:
        hint = None
    if hint is not None:
        if hint.status is Status.INFEASIBLE:
            run = _certify_basis(sys, hint.phase1_basis, phase=1)
        elif hint.status is Status.OPTIMAL:
            run = _certify_basis(sys, hint.basis, phase=2)
    if run is None:
        run = _exact_two_phase(sys)
    m = std.n_user_rows
    if run.status is Status.INFEASIBLE:
        return LpSolution(Status.INFEASIBLE, None, None, run.y[:m], None, True, run.iterations,
                          run.residual, run.basis)
    x = std.recover(run.x)
    if run.status is Status.UNBOUNDED:
        return LpSolution(Status.UNBOUNDED, None, x, None, std.recover_direction(run.ray), True,
                          run.iterations, Fraction(0), run.basis)
    value = sum((std.c[j] * run.x[j] for j in range(len(run.x))), Fraction(0)) + std.const
    return LpSolution(Status.OPTIMAL, value, x, run.y[:m], None, True, run.iterations,
                      Fraction(0), run.basis)


def feasibility(A_eq, b_eq, lower=None, upper=None, exact: bool = False,
                eps: float = DEFAULT_EPS) -> LpSolution:
    """Decide whether ``A_eq x = b_eq`` has a solution within the bounds.

    A feasible answer carries the witness in ``x``; an infeasible one a
    Farkas vector in ``y``.
    """
    A = np.asarray(A_eq, dtype=object)
    n = A.shape[1] if A.ndim == 2 else 0
    zero = Fraction(0) if exact else 0.0
    return solve(LpProblem([zero] * n, A_eq, b_eq, lower, upper), exact=exact, eps=eps)
