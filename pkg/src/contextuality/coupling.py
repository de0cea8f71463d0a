"""Couplings of several distributions over one outcome alphabet.

A coupling of marginals ``p_1 .. p_l`` is a joint table over ``O^l`` whose
single-variable marginals are the ``p_j``. Joint tables are flat vectors in
lexicographic order, first variable most significant.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .lp import DEFAULT_EPS, LpProblem, Status, solve

MAX_MULTIMAXIMAL_ARITY = 6


class CouplingPolicy(str, enum.Enum):
    MAXIMAL = "maximal"
    MULTIMAXIMAL = "multimaximal"


class CouplingError(ValueError):
    """A requested coupling does not exist (only possible for multimaximal couplings)."""

    def __init__(self, message: str, certificate: Any = None):
        super().__init__(message)
        self.certificate = certificate


@dataclass(frozen=True, eq=False)
class CouplingTable:
    marginals: tuple[np.ndarray, ...]
    joint: np.ndarray

    @property
    def arity(self) -> int:
        return len(self.marginals)

    @property
    def n_outcomes(self) -> int:
        return len(self.marginals[0])

    def marginal(self, j: int) -> np.ndarray:
        k, l = self.n_outcomes, self.arity
        axes = tuple(ax for ax in range(l) if ax != j)
        return self.joint.reshape((k,) * l).sum(axis=axes)

    def p_equal(self, subset: Sequence[int] | None = None):
        """Probability that all variables in ``subset`` (default: all) agree."""
        return self.joint.dot(equality_indicator(self.n_outcomes, self.arity, subset))


@dataclass(frozen=True)
class CouplingNonexistent:
    """Typed negative result: no multimaximal coupling exists for the marginals."""

    marginals: tuple[np.ndarray, ...]
    certificate: Any = field(repr=False)
    reason: str = "no multimaximal coupling exists"


def _check(marginals: Sequence[Sequence[Any]]) -> tuple[np.ndarray, ...]:
    if len(marginals) < 1:
        raise ValueError("need at least one marginal")
    out = []
    for p in marginals:
        arr = np.asarray(p)
        if arr.dtype != object:
            arr = arr.astype(np.float64)
        out.append(arr.reshape(-1))
    k = len(out[0])
    for j, p in enumerate(out):
        if len(p) != k:
            raise ValueError(f"marginal {j} has {len(p)} outcomes, expected {k} (mismatched alphabets)")
    return tuple(out)


def mu(marginals: Sequence[Sequence[Any]]):
    """Largest achievable P(all equal) over couplings: the sum over outcomes of the smallest mass."""
    ps = _check(marginals)
    return sum((min(col) for col in zip(*ps)), ps[0][0] * 0)


def equality_indicator(k: int, l: int, subset: Sequence[int] | None = None) -> np.ndarray:
    """0/1 vector over ``O^l`` marking cells where the variables of ``subset`` coincide."""
    subset = range(l) if subset is None else list(subset)
    cells = np.array(list(itertools.product(range(k), repeat=l)), dtype=np.int64).reshape(-1, l)
    sub = cells[:, list(subset)]
    return np.all(sub == sub[:, :1], axis=1).astype(np.int64)


def _outer(vectors: Sequence[np.ndarray]) -> np.ndarray:
    out = vectors[0]
    for v in vectors[1:]:
        out = np.multiply.outer(out, v)
    return np.asarray(out).reshape(-1)


def canonical_maximal_coupling(marginals: Sequence[Sequence[Any]]) -> CouplingTable:
    """Diagonal mass ``min_j p_j(a)`` plus the product of normalized residuals."""
    ps = _check(marginals)
    exact = ps[0].dtype == object
    k, l = len(ps[0]), len(ps)
    d = np.array([min(col) for col in zip(*ps)], dtype=ps[0].dtype)
    joint = np.zeros(k ** l, dtype=object if exact else np.float64)
    if exact:
        joint[:] = Fraction(0)
    stride = sum(k ** e for e in range(l))  # flat index of (a, .., a) is a * stride
    for a in range(k):
        joint[a * stride] += d[a]
    residual = [p - d for p in ps]
    sums = [r.sum() for r in residual]
    mass = 1 - d.sum()
    if mass > 0 and all(s > 0 for s in sums):
        joint = joint + mass * _outer([r / s for r, s in zip(residual, sums)])
    return CouplingTable(ps, joint)


def _subsets(l: int):
    for size in range(2, l + 1):
        yield from itertools.combinations(range(l), size)


def is_multimaximal(table: CouplingTable, tol: float = 1e-12) -> bool:
    for sub in _subsets(table.arity):
        target = mu([table.marginals[j] for j in sub])
        if abs(table.p_equal(sub) - target) > tol:
            return False
    return True


def multimaximal_problem(marginals: Sequence[Sequence[Any]]) -> LpProblem:
    """Feasibility system: marginal rows, then one row per subset of size >= 2."""
    ps = _check(marginals)
    k, l = len(ps[0]), len(ps)
    cells = np.array(list(itertools.product(range(k), repeat=l)), dtype=np.int64).reshape(-1, l)
    rows, rhs = [], []
    for j in range(l):
        for a in range(k):
            rows.append((cells[:, j] == a).astype(np.int64))
            rhs.append(ps[j][a])
    for sub in _subsets(l):
        rows.append(equality_indicator(k, l, sub))
        rhs.append(mu([ps[j] for j in sub]))
    A = np.array(rows, dtype=np.int64)
    c = np.zeros(k ** l, dtype=np.int64)
    b = np.array(rhs, dtype=object if ps[0].dtype == object else np.float64)
    return LpProblem(c, A, b)


def multimaximal_coupling(marginals: Sequence[Sequence[Any]], exact: bool | None = None,
                          eps: float = DEFAULT_EPS) -> CouplingTable | CouplingNonexistent:
    """A coupling that is maximal on every subset of its variables, if one exists.

    The canonical maximal coupling is returned whenever it qualifies; otherwise
    an LP searches for one and a failed search yields :class:`CouplingNonexistent`
    carrying the Farkas vector.
    """
    ps = _check(marginals)
    if len(ps) > MAX_MULTIMAXIMAL_ARITY:
        raise ValueError(f"multimaximal search supports at most {MAX_MULTIMAXIMAL_ARITY} variables, got {len(ps)}")
    if exact is None:
        exact = ps[0].dtype == object
    canonical = canonical_maximal_coupling(ps)
    if is_multimaximal(canonical, tol=0 if exact else 1e-12):
        return canonical
    sol = solve(multimaximal_problem(ps), exact=exact, eps=eps)
    if sol.status is Status.INFEASIBLE:
        return CouplingNonexistent(ps, sol.y)
    joint = np.asarray(sol.x, dtype=object if exact else np.float64)
    if not exact:
        joint = np.where(joint < 0, 0.0, joint)
    return CouplingTable(ps, joint)


def coupling_for(marginals: Sequence[Sequence[Any]], policy: CouplingPolicy,
                 eps: float = DEFAULT_EPS) -> CouplingTable:
    """The coupling a policy prescribes; raises :class:`CouplingError` if none exists."""
    if CouplingPolicy(policy) is CouplingPolicy.MAXIMAL:
        return canonical_maximal_coupling(marginals)
    res = multimaximal_coupling(marginals, eps=eps)
    if isinstance(res, CouplingNonexistent):
        raise CouplingError(res.reason, res.certificate)
    return res


def mu_lp(marginals: Sequence[Sequence[Any]], exact: bool = False):
    """LP optimum of P(all equal) over couplings; an oracle for :func:`mu`."""
    ps = _check(marginals)
    k, l = len(ps[0]), len(ps)
    cells = np.array(list(itertools.product(range(k), repeat=l)), dtype=np.int64).reshape(-1, l)
    rows, rhs = [], []
    for j in range(l):
        for a in range(k):
            rows.append((cells[:, j] == a).astype(np.int64))
            rhs.append(ps[j][a])
    c = -equality_indicator(k, l)
    b = np.array(rhs, dtype=object if exact else np.float64)
    sol = solve(LpProblem(c, np.array(rows), b), exact=exact)
    if sol.status is not Status.OPTIMAL:
        raise ValueError(f"coupling LP not optimal: {sol.status}")
    return -sol.value
