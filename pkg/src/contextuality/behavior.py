"""Behaviors: one outcome distribution per context.

A context table is a flat vector indexed by outcome tuples in lexicographic
order of outcome indices, first context member most significant. Tables are
float64 arrays, or object arrays of :class:`fractions.Fraction` in exact mode.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .scenario import Scenario, n_cycle

EPS_PROB = 1e-9
EPS_DISTURBANCE = 1e-7


class BehaviorError(ValueError):
    """Invalid behavior; ``violations`` lists ``(kind, detail)`` pairs."""

    def __init__(self, violations: list[tuple[str, str]]):
        self.violations = violations
        super().__init__("; ".join(f"{kind}: {detail}" for kind, detail in violations))


@dataclass(frozen=True, eq=False)
class Behavior:
    scenario: Scenario
    tables: tuple[np.ndarray, ...]

    @property
    def exact(self) -> bool:
        return bool(self.tables) and self.tables[0].dtype == object

    def table(self, context_index: int) -> np.ndarray:
        return self.tables[context_index]

    def vector(self) -> np.ndarray:
        """All tables concatenated in context order (the LP right-hand side)."""
        return np.concatenate(self.tables)

    def as_float(self) -> "Behavior":
        if not self.exact:
            return self
        return Behavior(self.scenario, tuple(np.array(t, dtype=np.float64) for t in self.tables))

    def as_exact(self) -> "Behavior":
        """Rational copy holding each float's exact value.

        A table whose exact sum misses 1 by rounding dust has the gap added to
        its largest entry; marginal agreement is not repaired.
        """
        if self.exact:
            return self
        tables = []
        for t in self.tables:
            vals = [Fraction(float(v)) for v in t]
            gap = 1 - sum(vals, Fraction(0))
            if gap:
                j = max(range(len(vals)), key=lambda i: vals[i])
                vals[j] += gap
            tables.append(np.array(vals, dtype=object))
        return Behavior(self.scenario, tuple(tables))

    def to_dict(self) -> dict[str, Any]:
        def enc(v):
            if isinstance(v, Fraction):
                return str(v) if v.denominator != 1 else int(v)
            return float(v)
        return {"scenario": self.scenario.to_dict(), "tables": [[enc(v) for v in t] for t in self.tables]}


def _coerce(value: Any, exact: bool):
    if isinstance(value, str):
        frac = Fraction(value.strip())
        return frac if exact else float(frac)
    if isinstance(value, bool) or not isinstance(value, (int, float, Fraction, np.integer, np.floating)):
        raise TypeError(f"not a probability: {value!r}")
    return Fraction(value) if exact else float(value)


def make_behavior(scenario: Scenario, tables: Sequence[Sequence[Any]], exact: bool = False,
                  eps: float = EPS_PROB) -> Behavior:
    """Validate per-context tables and build a :class:`Behavior`.

    Entries below zero by at most ``eps`` are clamped to zero. In exact mode
    entries become Fractions and normalization is checked exactly.
    """
    errors: list[tuple[str, str]] = []
    if len(tables) != len(scenario.contexts):
        raise BehaviorError([("table-count",
                              f"expected {len(scenario.contexts)} tables, got {len(tables)}")])
    out = []
    for i, raw in enumerate(tables):
        want = scenario.table_size(i)
        if len(raw) != want:
            errors.append(("table-length", f"context {i} {list(scenario.contexts[i])}: "
                                           f"expected {want} entries, got {len(raw)}"))
            continue
        try:
            vals = [_coerce(v, exact) for v in raw]
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            errors.append(("not-a-number", f"context {i}: {exc}"))
            continue
        if exact:
            if any(v < 0 for v in vals):
                errors.append(("negative", f"context {i} {list(scenario.contexts[i])}"))
            total = sum(vals, Fraction(0))
            if total != 1:
                errors.append(("normalization", f"context {i} {list(scenario.contexts[i])} sums to {total}"))
            out.append(np.array(vals, dtype=object))
        else:
            arr = np.array(vals, dtype=np.float64)
            if not np.all(np.isfinite(arr)):
                errors.append(("not-a-number", f"context {i}: non-finite entry"))
                continue
            if arr.min(initial=0.0) < -eps:
                errors.append(("negative", f"context {i} {list(scenario.contexts[i])} has entry {arr.min()}"))
            arr = np.where(arr < 0, 0.0, arr)
            total = float(arr.sum())
            if abs(total - 1.0) > eps:
                errors.append(("normalization", f"context {i} {list(scenario.contexts[i])} sums to {total:.12g}"))
            out.append(arr)
    if errors:
        raise BehaviorError(errors)
    return Behavior(scenario, tuple(out))


def marginal(b: Behavior, context_index: int, subset: Sequence[str]) -> np.ndarray:
    """Marginal of one context table onto ``subset`` (kept in ``subset`` order)."""
    ctx = b.scenario.contexts[context_index]
    subset = list(subset)
    missing = [x for x in subset if x not in ctx]
    if missing or len(set(subset)) != len(subset):
        raise ValueError(f"subset {subset} is not a sub-list of context {context_index} {list(ctx)}")
    k = b.scenario.n_outcomes
    t = b.tables[context_index].reshape((k,) * len(ctx))
    keep = [ctx.index(x) for x in subset]
    drop = tuple(ax for ax in range(len(ctx)) if ax not in keep)
    reduced = t.sum(axis=drop) if drop else t
    remaining = [ax for ax in range(len(ctx)) if ax in keep]
    order = [remaining.index(ax) for ax in keep]
    reduced = np.transpose(reduced, order) if order else reduced
    flat = np.asarray(reduced).reshape(-1)
    total = flat.sum()
    if total != 0 and total != 1:
        flat = flat / total
    return flat


def single_marginal(b: Behavior, context_index: int, x: str) -> np.ndarray:
    return marginal(b, context_index, [x])


@dataclass(frozen=True)
class NondisturbanceReport:
    nondisturbing: bool
    max_violation: float
    location: tuple[int, int, tuple[str, ...]] | None

    def __bool__(self) -> bool:
        return self.nondisturbing


def is_nondisturbing(b: Behavior, tol: float = EPS_DISTURBANCE) -> NondisturbanceReport:
    """Compare marginals on every overlap of every context pair.

    Checking the full intersection suffices: marginals of agreeing
    distributions agree on every sub-collection.
    """
    worst = 0.0
    where = None
    ctxs = b.scenario.contexts
    for i, j in itertools.combinations(range(len(ctxs)), 2):
        shared = tuple(x for x in ctxs[i] if x in ctxs[j])
        if not shared:
            continue
        diff = marginal(b, i, shared) - marginal(b, j, shared)
        v = float(max(abs(d) for d in diff))
        if v > worst:
            worst, where = v, (i, j, shared)
    return NondisturbanceReport(worst <= tol, worst, where)


def _pair_table(e1, e2, corr) -> list:
    """p(a, b) for a, b in (-1, +1) order with E[a]=e1, E[b]=e2, E[ab]=corr."""
    out = []
    for a, bb in itertools.product((-1, 1), repeat=2):
        out.append((1 + a * e1 + bb * e2 + a * bb * corr) / 4)
    return out


def from_correlators(n: int, pairs: Sequence[Any], singles: Sequence[Any], exact: bool = False) -> Behavior:
    """Build an n-cycle behavior from its correlators.

    ``pairs[i]`` is the correlator of context ``{i, i+1}``. ``singles`` has
    either ``n`` entries (one expectation per measurement, nondisturbing) or
    ``2n`` entries ordered per context: ``<i>`` then ``<i+1>`` as seen from
    context ``i``.
    """
    if len(pairs) != n:
        raise ValueError(f"need {n} pair correlators, got {len(pairs)}")
    conv = (lambda v: Fraction(v) if not isinstance(v, str) else Fraction(v)) if exact else float
    pairs = [conv(v) for v in pairs]
    singles = [conv(v) for v in singles]
    if len(singles) == n:
        slots = [(singles[i], singles[(i + 1) % n]) for i in range(n)]
    elif len(singles) == 2 * n:
        slots = [(singles[2 * i], singles[2 * i + 1]) for i in range(n)]
    else:
        raise ValueError(f"need {n} or {2 * n} single expectations, got {len(singles)}")
    errors = []
    for i, v in enumerate(pairs):
        if abs(v) > 1:
            errors.append(("correlator-range", f"pair {i} = {v}"))
    for i, (u, w) in enumerate(slots):
        if abs(u) > 1 or abs(w) > 1:
            errors.append(("correlator-range", f"singles of context {i} = ({u}, {w})"))
    tables = []
    for i in range(n):
        t = _pair_table(slots[i][0], slots[i][1], pairs[i])
        if min(t) < 0:
            errors.append(("infeasible-correlators", f"context {i} would get p = {[float(v) for v in t]}"))
        tables.append(t)
    if errors:
        raise BehaviorError(errors)
    return make_behavior(n_cycle(n), tables, exact=exact)


def from_dict(data: Any, scenario: Scenario | None = None, exact: bool = False) -> Behavior:
    """Parse the JSON behavior object; ``scenario`` overrides an embedded one."""
    from .scenario import from_dict as scenario_from_dict

    if not isinstance(data, dict):
        raise BehaviorError([("parse", "behavior must be a JSON object")])
    extra = [k for k in data if k not in ("scenario", "tables")]
    if extra:
        raise BehaviorError([("parse", f"unknown key {k!r}") for k in extra])
    if "tables" not in data or not isinstance(data["tables"], list):
        raise BehaviorError([("parse", "'tables' must be an array of arrays")])
    if scenario is None:
        if not isinstance(data.get("scenario"), dict):
            raise BehaviorError([("parse", "'scenario' must be an object (or a path resolved by the caller)")])
        scenario = scenario_from_dict(data["scenario"])
    tables = data["tables"]
    if not all(isinstance(t, list) for t in tables):
        raise BehaviorError([("parse", "'tables' must be an array of arrays")])
    return make_behavior(scenario, tables, exact=exact)
