"""Closed-form machinery for cycle scenarios with outcomes -1 and +1.

A behavior on the n-cycle is described by its pair correlators
``<i (i+1)>`` (taken in context i) and two single expectations per
measurement: ``left[i]`` seen from context ``i-1`` and ``right[i]`` seen
from context ``i``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .behavior import EPS_PROB, Behavior, BehaviorError, from_correlators, marginal
from .lp import DEFAULT_EPS
from .scenario import Scenario


def s_function(z: Sequence[Any]):
    """Max of ``sum(g_i z_i)`` over sign vectors with an odd number of -1 entries.

    Closed form: all signs match their entries when an odd number are
    negative; otherwise the smallest entry in absolute value is flipped.
    Works on floats and Fractions alike.
    """
    z = list(z)
    if not z:
        raise ValueError("s_function needs at least one entry")
    mags = [abs(v) for v in z]
    total = sum(mags[1:], mags[0])
    negatives = sum(1 for v in z if v < 0)
    if negatives % 2 == 1:
        return total
    return total - 2 * min(mags)


def s_function_exhaustive(z: Sequence[Any]):
    """Reference enumeration over all odd-parity sign vectors."""
    z = list(z)
    best = None
    for signs in itertools.product((1, -1), repeat=len(z)):
        if signs.count(-1) % 2 == 0:
            continue
        v = sum((g * x for g, x in zip(signs, z)), z[0] * 0)
        if best is None or v > best:
            best = v
    return best


def coupling_correlator(left: Any, right: Any):
    """Correlator of a maximal coupling of two +-1 variables with the given expectations."""
    for v in (left, right):
        slack = 0 if isinstance(v, (int, Fraction)) else EPS_PROB
        if abs(v) > 1 + slack:
            raise ValueError(f"expectation {v} outside [-1, 1]")
    return 1 - abs(left - right)


@dataclass(frozen=True)
class CycleCorrelators:
    n: int
    pair: tuple[Any, ...]
    left: tuple[Any, ...]
    right: tuple[Any, ...]

    def __post_init__(self) -> None:
        values = self.pair + self.left + self.right
        slack = 0 if all(isinstance(v, (int, Fraction)) for v in values) else EPS_PROB
        if self.n < 3:
            raise ValueError(f"cycle needs n >= 3, got {self.n}")
        for name in ("pair", "left", "right"):
            vals = getattr(self, name)
            if len(vals) != self.n:
                raise ValueError(f"{name} needs {self.n} entries, got {len(vals)}")
            bad = [v for v in vals if abs(v) > 1 + slack]
            if bad:
                raise ValueError(f"{name} entries outside [-1, 1]: {bad}")
        for i in range(self.n):
            a, c, corr = self.right[i], self.left[(i + 1) % self.n], self.pair[i]
            for sa, sc in itertools.product((-1, 1), repeat=2):
                if 1 + sa * a + sc * c + sa * sc * corr < -4 * slack:
                    raise ValueError(f"context {i} correlators give a negative probability")

    @classmethod
    def from_flat(cls, n: int, pair: Sequence[Any], singles: Sequence[Any]) -> "CycleCorrelators":
        """``singles`` as in :func:`contextuality.behavior.from_correlators` (n or 2n values)."""
        if len(singles) == n:
            return cls(n, tuple(pair), tuple(singles), tuple(singles))
        if len(singles) != 2 * n:
            raise ValueError(f"need {n} or {2 * n} single expectations, got {len(singles)}")
        right = tuple(singles[2 * i] for i in range(n))
        left = tuple(singles[2 * ((i - 1) % n) + 1] for i in range(n))
        return cls(n, tuple(pair), left, right)

    def flat_singles(self) -> list[Any]:
        out = []
        for i in range(self.n):
            out += [self.right[i], self.left[(i + 1) % self.n]]
        return out

    def to_behavior(self, exact: bool = False) -> Behavior:
        return from_correlators(self.n, list(self.pair), self.flat_singles(), exact=exact)

    @property
    def nondisturbing(self) -> bool:
        return all(a == b for a, b in zip(self.left, self.right))

    def coupling_terms(self) -> list[Any]:
        """Coupling correlator of measurement ``j`` between its two contexts, for every ``j``."""
        return [coupling_correlator(self.left[j], self.right[j]) for j in range(self.n)]

    def extended_vector(self) -> list[Any]:
        """Edge values around the extended 2n-cycle: pair ``i`` then the coupling of ``i+1``."""
        terms = self.coupling_terms()
        out = []
        for i in range(self.n):
            out += [self.pair[i], terms[(i + 1) % self.n]]
        return out


def _spin(label: str) -> int:
    v = int(label)
    if v not in (-1, 1):
        raise ValueError(f"outcome label {label!r} is not -1 or +1")
    return v


def cycle_order(s: Scenario) -> list[str] | None:
    """Measurements in cycle order if ``s`` is the n-cycle ``{i, i+1}`` in its stored order."""
    n = len(s.measurements)
    if n < 3 or len(s.contexts) != n:
        return None
    order = list(s.measurements)
    for i, ctx in enumerate(s.contexts):
        if tuple(ctx) != (order[i], order[(i + 1) % n]):
            return None
    try:
        if sorted(_spin(o) for o in s.outcomes.labels) != [-1, 1]:
            return None
    except ValueError:
        return None
    return order


def correlators(b: Behavior) -> CycleCorrelators:
    """Read the correlators off a behavior on an n-cycle scenario."""
    s = b.scenario
    order = cycle_order(s)
    if order is None:
        raise BehaviorError([("not-a-cycle", "scenario is not an n-cycle with outcomes -1, +1")])
    n = len(order)
    spins = [_spin(o) for o in s.outcomes.labels]
    prod = np.array([a * c for a in spins for c in spins], dtype=np.int64)
    scalar = (lambda v: v) if b.exact else float
    pair, left, right = [], [None] * n, [None] * n
    for i in range(n):
        pair.append(scalar(b.tables[i].dot(prod)))
        right[i] = scalar(marginal(b, i, [order[i]]).dot(spins))
        left[(i + 1) % n] = scalar(marginal(b, i, [order[(i + 1) % n]]).dot(spins))
    return CycleCorrelators(n, tuple(pair), tuple(left), tuple(right))


@dataclass(frozen=True)
class CriterionResult:
    noncontextual: bool
    s: Any
    bound: int
    excess: Any
    boundary: bool

    def to_dict(self) -> dict[str, Any]:
        def num(v):
            if isinstance(v, Fraction):
                return str(v) if v.denominator != 1 else int(v)
            return float(v)
        return {"verdict": "noncontextual" if self.noncontextual else "contextual",
                "s": num(self.s), "bound": self.bound, "excess": num(self.excess), "boundary": self.boundary}


def _decide(vector: Sequence[Any], bound: int, eps: float) -> CriterionResult:
    s = s_function(vector)
    raw = s - bound
    exact = isinstance(raw, Fraction) or isinstance(raw, int)
    excess = max(raw, raw * 0)
    if exact:
        return CriterionResult(excess == 0, s, bound, excess, raw == 0)
    ok = float(excess) <= eps
    return CriterionResult(ok, s, bound, excess, ok and abs(float(raw)) <= 10 * eps)


def extended_criterion(c: CycleCorrelators, eps: float = DEFAULT_EPS) -> CriterionResult:
    """Compare ``s`` of the interleaved 2n-vector against ``2n - 2``.

    Float excess up to ``eps`` counts as noncontextual and is flagged as a
    boundary case when it sits within ten tolerances of zero.
    """
    return _decide(c.extended_vector(), 2 * c.n - 2, eps)


def traditional_criterion(c: CycleCorrelators, eps: float = DEFAULT_EPS) -> CriterionResult:
    """``s(pair) <= n - 2``; a complete test only for nondisturbing correlators."""
    return _decide(list(c.pair), c.n - 2, eps)


def closed_form_quantifiers(c: CycleCorrelators) -> dict[str, Any]:
    """Half the extended excess, claimed in the literature for Negativity, L1Uniform and Mu alike."""
    vec = c.extended_vector()
    raw = s_function(vec) - (2 * c.n - 2)
    half = max(raw, raw * 0) / 2
    return {"Negativity": half, "L1Uniform": half, "Mu": half}


def excess(c: CycleCorrelators, extended: bool = True):
    vec = c.extended_vector() if extended else list(c.pair)
    bound = 2 * c.n - 2 if extended else c.n - 2
    raw = s_function(vec) - bound
    return max(raw, raw * 0)
