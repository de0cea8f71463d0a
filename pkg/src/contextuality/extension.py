"""Extended scenarios: one copy of each measurement per context that contains it.

The extended scenario keeps every original context (on copies) and adds one
coupling context per measurement shared by two or more contexts, grouping
that measurement's copies. Copies are labelled ``<base>^<context_index>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Union

import numpy as np

from .behavior import Behavior, BehaviorError, make_behavior, single_marginal
from .coupling import CouplingPolicy, coupling_for
from .lp import DEFAULT_EPS
from .scenario import Scenario, ScenarioError, validate
from .scenario import from_dict as scenario_from_dict


@dataclass(frozen=True, order=True)
class CopyId:
    base: str
    context_index: int

    @property
    def label(self) -> str:
        return f"{self.base}^{self.context_index}"


@dataclass(frozen=True)
class Original:
    index: int

    def to_dict(self) -> dict[str, Any]:
        return {"original": self.index}


@dataclass(frozen=True)
class Coupling:
    measurement: str

    def to_dict(self) -> dict[str, Any]:
        return {"coupling": self.measurement}


ContextKind = Union[Original, Coupling]


@dataclass(frozen=True)
class ExtendedScenario:
    base: Scenario
    ext: Scenario
    context_kind: tuple[ContextKind, ...]
    copies: tuple[CopyId, ...]  # aligned with ext.measurements

    def copy_of(self, label: str) -> CopyId:
        return self.copies[self.ext.measurements.index(label)]

    def original_contexts(self) -> list[int]:
        return [i for i, k in enumerate(self.context_kind) if isinstance(k, Original)]

    def coupling_contexts(self) -> list[int]:
        return [i for i, k in enumerate(self.context_kind) if isinstance(k, Coupling)]

    def coupling_context_of(self, x: str) -> int | None:
        for i, k in enumerate(self.context_kind):
            if isinstance(k, Coupling) and k.measurement == x:
                return i
        return None

    def to_dict(self) -> dict[str, Any]:
        out = self.ext.to_dict()
        out["context_kind"] = [k.to_dict() for k in self.context_kind]
        return out


def extend(s: Scenario) -> ExtendedScenario:
    copies: list[CopyId] = []
    for x in s.measurements:
        copies.extend(CopyId(x, i) for i in s.contexts_of(x))
    contexts: list[tuple[str, ...]] = []
    kinds: list[ContextKind] = []
    for i, ctx in enumerate(s.contexts):
        contexts.append(tuple(CopyId(x, i).label for x in ctx))
        kinds.append(Original(i))
    for x in s.measurements:
        where = s.contexts_of(x)
        if len(where) >= 2:
            contexts.append(tuple(CopyId(x, i).label for i in where))
            kinds.append(Coupling(x))
    ext = validate([c.label for c in copies], contexts, s.outcomes.labels)
    return ExtendedScenario(s, ext, tuple(kinds), tuple(copies))


def copy_marginals(e: ExtendedScenario, b: Behavior, x: str) -> list[np.ndarray]:
    """Single-measurement marginals of ``x`` in each context containing it (``contexts_of`` order)."""
    return [single_marginal(b, i, x) for i in e.base.contexts_of(x)]


def lift_behavior(e: ExtendedScenario, b: Behavior, policy: CouplingPolicy = CouplingPolicy.MAXIMAL,
                  eps: float = DEFAULT_EPS) -> Behavior:
    """Extended behavior: original tables verbatim plus the policy's coupling per shared measurement.

    Raises :class:`~contextuality.coupling.CouplingError` when the policy
    admits no coupling for some measurement.
    """
    if b.scenario != e.base:
        raise BehaviorError([("scenario-mismatch", "behavior is not defined on the extended scenario's base")])
    tables = []
    for kind in e.context_kind:
        if isinstance(kind, Original):
            tables.append(b.tables[kind.index])
        else:
            tables.append(coupling_for(copy_marginals(e, b, kind.measurement), policy, eps=eps).joint)
    # validation clamps float dust only; originals stay bit-identical
    lifted = make_behavior(e.ext, [list(t) for t in tables], exact=b.exact)
    fixed = list(lifted.tables)
    for i in e.original_contexts():
        fixed[i] = b.tables[e.context_kind[i].index]
    return Behavior(e.ext, tuple(fixed))


def restrict_to_original(e: ExtendedScenario, lifted: Behavior) -> Behavior:
    tables = [lifted.tables[i] for i in e.original_contexts()]
    return Behavior(e.base, tuple(tables))


def from_dict(data: Any) -> ExtendedScenario:
    """Parse an extended-scenario object and check it matches the extension of its own base."""
    if not isinstance(data, dict) or "context_kind" not in data:
        raise ScenarioError([("parse", "extended scenario needs a 'context_kind' array")])
    plain = {k: v for k, v in data.items() if k != "context_kind"}
    ext = scenario_from_dict(plain)
    originals = [c for c, k in zip(ext.contexts, data["context_kind"]) if "original" in k]
    base_ms: list[str] = []
    for label in ext.measurements:
        x = label.rsplit("^", 1)[0]
        if x not in base_ms:
            base_ms.append(x)
    base_ctx = [[label.rsplit("^", 1)[0] for label in c] for c in originals]
    base = validate(base_ms, base_ctx, ext.outcomes.labels)
    e = extend(base)
    if e.to_dict() != data:
        raise ScenarioError([("parse", "extended scenario is not the extension of its original contexts")])
    return e
