"""Problem and solution containers for the LP kernel."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np


class LpError(ValueError):
    """Raised for malformed linear programs."""


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


def _as_matrix(a: Any, exact: bool) -> np.ndarray:
    if exact:
        arr = np.asarray(a, dtype=object)
        return arr
    return np.asarray(a, dtype=np.float64)


@dataclass(frozen=True)
class LpProblem:
    """``min c.x  s.t.  A_eq x = b_eq,  lower <= x <= upper``.

    ``lower`` defaults to zero for every variable and ``upper`` to +inf.
    Use ``-np.inf`` / ``np.inf`` for missing bounds. Entries may be floats,
    ints or :class:`fractions.Fraction`; the solver mode decides how they are
    interpreted.
    """

    c: Any
    A_eq: Any
    b_eq: Any
    lower: Any = None
    upper: Any = None

    def __post_init__(self) -> None:
        c = np.asarray(self.c, dtype=object).reshape(-1)
        A = np.asarray(self.A_eq, dtype=object)
        b = np.asarray(self.b_eq, dtype=object).reshape(-1)
        n = c.shape[0]
        if A.size == 0:
            A = A.reshape(0, n)
        if A.ndim != 2:
            raise LpError(f"A_eq must be 2-D, got shape {A.shape}")
        if A.shape[1] != n:
            raise LpError(f"A_eq has {A.shape[1]} columns but c has {n} entries")
        if A.shape[0] != b.shape[0]:
            raise LpError(f"A_eq has {A.shape[0]} rows but b_eq has {b.shape[0]} entries")
        for name in ("lower", "upper"):
            bound = getattr(self, name)
            if bound is not None and np.asarray(bound, dtype=object).reshape(-1).shape[0] != n:
                raise LpError(f"{name} must have {n} entries")

    @property
    def n_vars(self) -> int:
        return int(np.asarray(self.c, dtype=object).reshape(-1).shape[0])

    @property
    def n_rows(self) -> int:
        return int(np.asarray(self.b_eq, dtype=object).reshape(-1).shape[0])

    def bounds(self) -> tuple[list, list]:
        """Lower and upper bounds as Python lists (infinite bounds as floats)."""
        n = self.n_vars
        lo = [0] * n if self.lower is None else list(np.asarray(self.lower, dtype=object).reshape(-1))
        hi = [np.inf] * n if self.upper is None else list(np.asarray(self.upper, dtype=object).reshape(-1))
        return lo, hi

    def arrays(self, exact: bool) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        c = _as_matrix(self.c, exact).reshape(-1)
        A = _as_matrix(self.A_eq, exact).reshape(self.n_rows, self.n_vars)
        b = _as_matrix(self.b_eq, exact).reshape(-1)
        if exact:
            conv = np.vectorize(to_fraction, otypes=[object])
            c = conv(c) if c.size else c
            A = conv(A) if A.size else A
            b = conv(b) if b.size else b
        return c, A, b


def to_fraction(v: Any) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, str):
        return Fraction(v)
    return Fraction(float(v))


@dataclass
class LpSolution:
    """Verdict and witnesses of one solve.

    ``y`` holds the equality-row multipliers: an optimal dual for OPTIMAL
    problems, a Farkas vector for INFEASIBLE ones (``y.A <= 0`` on the box,
    ``y.b > 0``). ``ray`` is an improving direction for UNBOUNDED problems.
    """

    status: Status
    value: Any = None
    x: np.ndarray | None = None
    y: np.ndarray | None = None
    ray: np.ndarray | None = None
    exact: bool = False
    iterations: int = 0
    phase_one_residual: Any = None
    basis: tuple[int, ...] = field(default_factory=tuple)

    @property
    def feasible(self) -> bool:
        return self.status is not Status.INFEASIBLE

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL
