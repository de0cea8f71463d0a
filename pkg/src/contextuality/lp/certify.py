"""Independent checks of solver verdicts.

Every check works directly on the user's problem (original variables and
bounds), not on the standard form the simplex solved, so it does not share
code paths with the solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .problem import LpProblem, LpSolution, Status


@dataclass(frozen=True)
class Certificate:
    ok: bool
    reason: str
    primal_residual: float = 0.0
    bound_violation: float = 0.0
    duality_gap: float = 0.0


def _inf(v) -> int:
    if isinstance(v, (float, np.floating)) and math.isinf(v):
        return 1 if v > 0 else -1
    return 0


def _arrays(problem: LpProblem, exact: bool):
    c, A, b = problem.arrays(exact)
    lo, hi = problem.bounds()
    return c, A, b, lo, hi


def _box_extreme(g, lo, hi, maximize: bool, tol=0):
    """sup (or inf) of g.x over the box lo <= x <= hi; None when unbounded.

    Coefficients within ``tol`` of zero are ignored.
    """
    total = 0
    for gj, lj, hj in zip(g, lo, hi):
        if abs(gj) <= tol:
            continue
        upward = (gj > 0) == maximize
        bound = hj if upward else lj
        if _inf(bound):
            return None
        total = total + gj * bound
    return total


def check(problem: LpProblem, sol: LpSolution, eps: float = 1e-7) -> Certificate:
    """Verify that ``sol`` proves what its status claims, within ``eps``.

    Exact solutions are checked with zero tolerance.
    """
    exact = sol.exact
    tol = 0 if exact else eps
    c, A, b, lo, hi = _arrays(problem, exact)
    if exact:
        lo = [v if _inf(v) else Fraction(v) for v in lo]
        hi = [v if _inf(v) else Fraction(v) for v in hi]
    if sol.status is Status.INFEASIBLE:
        y = np.asarray(sol.y, dtype=object if exact else np.float64)
        g = y.dot(A) if A.size else np.zeros(A.shape[1], dtype=y.dtype)
        sup = _box_extreme(g, lo, hi, maximize=True, tol=tol)
        yb = y.dot(b) if b.size else 0
        if sup is None:
            return Certificate(False, "Farkas combination unbounded over the variable box")
        margin = yb - sup
        scale = 1 if exact else max(1.0, float(np.abs(y).max(initial=0.0)))
        if margin > tol * scale:
            return Certificate(True, "Farkas certificate verified", duality_gap=float(margin))
        return Certificate(False, f"Farkas margin {float(margin):.3e} not positive")

    x = np.asarray(sol.x, dtype=object if exact else np.float64)
    resid = A.dot(x) - b if A.size else np.zeros(0)
    primal = max((abs(float(v)) for v in resid), default=0.0)
    viol = 0.0
    for xj, lj, hj in zip(x, lo, hi):
        if not _inf(lj):
            viol = max(viol, float(lj - xj))
        if not _inf(hj):
            viol = max(viol, float(xj - hj))
    if exact:
        if any(v != 0 for v in resid) or viol > 0:
            return Certificate(False, "exact primal point infeasible", primal, viol)
    elif primal > eps or viol > eps:
        return Certificate(False, "primal point infeasible", primal, viol)

    if sol.status is Status.UNBOUNDED:
        d = np.asarray(sol.ray, dtype=object if exact else np.float64)
        Ad = A.dot(d) if A.size else np.zeros(0)
        if max((abs(float(v)) for v in Ad), default=0.0) > tol:
            return Certificate(False, "ray leaves the equality constraints", primal, viol)
        for dj, lj, hj in zip(d, lo, hi):
            if (not _inf(lj) and dj < -tol) or (not _inf(hj) and dj > tol):
                return Certificate(False, "ray leaves the variable box", primal, viol)
        if c.dot(d) < -tol:
            return Certificate(True, "improving ray verified", primal, viol)
        return Certificate(False, "ray does not improve the objective", primal, viol)

    # optimal: Lagrangian lower bound from y must meet the objective
    y = np.asarray(sol.y, dtype=object if exact else np.float64)
    r = c - (y.dot(A) if A.size else 0)
    inner = _box_extreme(r, lo, hi, maximize=False, tol=tol)
    if inner is None:
        return Certificate(False, "dual multipliers are not dual feasible", primal, viol)
    bound = (y.dot(b) if b.size else 0) + inner
    objective = c.dot(x)
    gap = objective - bound
    gap_f = float(gap)
    if exact:
        ok = gap == 0
    else:
        ok = abs(gap_f) <= eps * max(1.0, abs(float(objective)))
    return Certificate(ok, "optimality verified" if ok else f"duality gap {gap_f:.3e}", primal, viol, gap_f)
