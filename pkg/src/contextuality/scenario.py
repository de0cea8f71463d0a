"""Compatibility scenarios: measurements, contexts, and an outcome alphabet."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Sequence


class ScenarioError(ValueError):
    """A scenario candidate violates one or more structural invariants.

    ``violations`` lists every problem found, each as ``(kind, detail)``.
    """

    def __init__(self, violations: list[tuple[str, str]]):
        self.violations = violations
        super().__init__("; ".join(f"{kind}: {detail}" for kind, detail in violations))


@dataclass(frozen=True)
class OutcomeAlphabet:
    labels: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)


@dataclass(frozen=True)
class Scenario:
    """A validated scenario. Build with :func:`validate` or :func:`make_scenario`."""

    measurements: tuple[str, ...]
    contexts: tuple[tuple[str, ...], ...]
    outcomes: OutcomeAlphabet

    @property
    def n_outcomes(self) -> int:
        return len(self.outcomes)

    def table_size(self, context_index: int) -> int:
        return self.n_outcomes ** len(self.contexts[context_index])

    def contexts_of(self, measurement: str) -> list[int]:
        return contexts_of(self, measurement)

    def to_dict(self) -> dict[str, Any]:
        return {
            "outcomes": list(self.outcomes.labels),
            "measurements": list(self.measurements),
            "contexts": [list(c) for c in self.contexts],
        }


def _duplicates(items: Iterable[str]) -> list[str]:
    seen: set[str] = set()
    dup: list[str] = []
    for it in items:
        if it in seen and it not in dup:
            dup.append(it)
        seen.add(it)
    return dup


def validate(measurements: Sequence[str], contexts: Sequence[Sequence[str]],
             outcomes: Sequence[str]) -> Scenario:
    """Check every scenario invariant and return the validated :class:`Scenario`.

    Raises :class:`ScenarioError` carrying the complete list of violations.
    """
    errors: list[tuple[str, str]] = []
    measurements = tuple(str(m) for m in measurements)
    contexts = tuple(tuple(str(x) for x in c) for c in contexts)
    outcomes = tuple(str(o) for o in outcomes)

    if not outcomes:
        errors.append(("empty-outcomes", "outcome alphabet must have at least one label"))
    for label in _duplicates(outcomes):
        errors.append(("duplicate-outcome", label))
    for label in _duplicates(measurements):
        errors.append(("duplicate-measurement", label))
    if not contexts:
        errors.append(("no-contexts", "at least one context is required"))

    known = set(measurements)
    for i, ctx in enumerate(contexts):
        if not ctx:
            errors.append(("empty-context", f"context {i}"))
        for x in ctx:
            if x not in known:
                errors.append(("unknown-measurement", f"{x!r} in context {i}"))
        for x in _duplicates(ctx):
            errors.append(("duplicate-in-context", f"{x!r} in context {i}"))

    sets = [frozenset(c) for c in contexts]
    for i, a in enumerate(sets):
        for j, b in enumerate(sets):
            if i != j and a and a <= b and (a != b or i > j):
                kind = "duplicate-context" if a == b else "subset-context"
                errors.append((kind, f"context {i} {sorted(a)} is contained in context {j} {sorted(b)}"))

    used = set().union(*sets) if sets else set()
    for x in measurements:
        if x not in used:
            errors.append(("orphan-measurement", x))

    if errors:
        raise ScenarioError(errors)
    return Scenario(measurements, contexts, OutcomeAlphabet(outcomes))


make_scenario = validate


def contexts_of(s: Scenario, x: str) -> list[int]:
    """Indices of the contexts containing ``x``, in scenario order."""
    if x not in s.measurements:
        raise KeyError(f"unknown measurement {x!r}")
    return [i for i, ctx in enumerate(s.contexts) if x in ctx]


def n_cycle(n: int) -> Scenario:
    """The n-cycle: measurements ``0..n-1``, contexts ``{i, i+1 mod n}``, outcomes ±1."""
    if n < 3:
        raise ValueError(f"n-cycle needs n >= 3, got {n}")
    ms = [str(i) for i in range(n)]
    ctxs = [(ms[i], ms[(i + 1) % n]) for i in range(n)]
    return validate(ms, ctxs, ("-1", "+1"))


def path_scenario() -> Scenario:
    """Three binary measurements x, y, z with contexts {x, y} and {y, z}."""
    return validate(("x", "y", "z"), (("x", "y"), ("y", "z")), ("-1", "+1"))


_SCENARIO_KEYS = ("outcomes", "measurements", "contexts")


def from_dict(data: Any) -> Scenario:
    """Parse the JSON scenario object; unknown keys are rejected."""
    if not isinstance(data, dict):
        raise ScenarioError([("parse", "scenario must be a JSON object")])
    extra = [k for k in data if k not in _SCENARIO_KEYS]
    missing = [k for k in _SCENARIO_KEYS if k not in data]
    errors = [("parse", f"unknown key {k!r}") for k in extra]
    errors += [("parse", f"missing key {k!r}") for k in missing]
    for k in _SCENARIO_KEYS:
        if k in data and not isinstance(data[k], list):
            errors.append(("parse", f"{k!r} must be an array"))
    if not errors and not all(isinstance(c, list) for c in data["contexts"]):
        errors.append(("parse", "'contexts' must be an array of arrays"))
    if errors:
        raise ScenarioError(errors)
    return validate(data["measurements"], data["contexts"], data["outcomes"])
