"""Deterministic vertices of the noncontextual polytope and the LP decisions built on them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .behavior import Behavior
from .coupling import CouplingNonexistent, CouplingPolicy, mu, multimaximal_coupling
from .extension import ExtendedScenario, copy_marginals, extend
from .lp import DEFAULT_EPS, LpProblem, Status, solve
from .scenario import Scenario

DEFAULT_CAP = 2 ** 20
WITNESS_ELIDE = 4096


class VertexCapError(ValueError):
    def __init__(self, required: int, cap: int):
        self.required = required
        self.cap = cap
        super().__init__(f"vertex enumeration needs {required} columns, above the cap of {cap}")


@dataclass(frozen=True, eq=False)
class VertexMatrix:
    """0/1 incidence matrix: rows are (context, outcome tuple), columns global assignments.

    ``row_of[i, j]`` is the global row hit by column ``j`` inside context ``i``.
    """

    scenario: Scenario
    row_of: np.ndarray
    offsets: tuple[int, ...]
    n_rows: int

    @property
    def n_cols(self) -> int:
        return self.row_of.shape[1]

    def matrix(self, dtype=np.int64) -> np.ndarray:
        A = np.zeros((self.n_rows, self.n_cols), dtype=dtype)
        cols = np.arange(self.n_cols)
        for rows in self.row_of:
            A[rows, cols] = 1
        return A

    def assignment(self, j: int) -> tuple[str, ...]:
        k = self.scenario.n_outcomes
        idx = np.unravel_index(j, (k,) * len(self.scenario.measurements))
        return tuple(self.scenario.outcomes.labels[int(a)] for a in idx)

    def context_rows(self, i: int) -> slice:
        return slice(self.offsets[i], self.offsets[i + 1])


def vertex_count(s: Scenario) -> int:
    return s.n_outcomes ** len(s.measurements)


def assignments(s: Scenario, cap: int = DEFAULT_CAP) -> np.ndarray:
    """All global assignments as outcome indices, lexicographic, one row each."""
    count = vertex_count(s)
    if count > cap:
        raise VertexCapError(count, cap)
    k, n = s.n_outcomes, len(s.measurements)
    grids = np.indices((k,) * n, dtype=np.int64)
    return grids.reshape(n, -1).T


def vertex_matrix(s: Scenario, cap: int = DEFAULT_CAP) -> VertexMatrix:
    assign = assignments(s, cap)
    k = s.n_outcomes
    offsets = [0]
    row_of = np.empty((len(s.contexts), assign.shape[0]), dtype=np.int64)
    for i, ctx in enumerate(s.contexts):
        pos = [s.measurements.index(x) for x in ctx]
        local = np.zeros(assign.shape[0], dtype=np.int64)
        for p in pos:
            local = local * k + assign[:, p]
        row_of[i] = offsets[-1] + local
        offsets.append(offsets[-1] + k ** len(ctx))
    return VertexMatrix(s, row_of, tuple(offsets), offsets[-1])


@dataclass(frozen=True, eq=False)
class QuasiSystem:
    """Equality system ``A (u - v) = B`` used by signed global decompositions."""

    vertices: VertexMatrix

    def problem(self, b: Behavior) -> LpProblem:
        A = self.vertices.matrix()
        n = A.shape[1]
        c = np.ones(2 * n, dtype=np.int64)
        return LpProblem(c, np.hstack([A, -A]), b.vector())

    def quasi(self, x: np.ndarray) -> np.ndarray:
        n = self.vertices.n_cols
        return x[:n] - x[n:]


def quasi_global_matrix(s: Scenario, cap: int = DEFAULT_CAP) -> QuasiSystem:
    return QuasiSystem(vertex_matrix(s, cap))


def near_threshold(margin: Any, eps: float) -> bool:
    """True when a float margin is too close to the tolerance to trust without exact arithmetic."""
    m = abs(float(margin))
    return 1e-4 * eps < m <= 10 * eps


def _elide(v: Any, limit: int = WITNESS_ELIDE):
    if v is None:
        return None
    v = list(v)
    if len(v) > limit:
        return None
    return [_num(x) for x in v]


def _num(v: Any):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else int(v)
    return float(v)


@dataclass
class Verdict:
    """Outcome of a decision LP.

    ``margin`` is the quantity compared against the tolerance: the phase-one
    residual for feasibility tests, the coupling deficit for the maximal
    extended test. ``boundary`` marks float margins close enough to the
    tolerance that the verdict was re-decided in exact arithmetic.
    """

    noncontextual: bool
    margin: Any
    exact: bool
    boundary: bool = False
    witness: Any = field(default=None, repr=False)
    certificate: Any = field(default=None, repr=False)
    reason: str = ""

    def to_dict(self, witness: bool = True) -> dict[str, Any]:
        out = {
            "verdict": "noncontextual" if self.noncontextual else "contextual",
            "margin": _num(self.margin),
            "exact": self.exact,
            "boundary": self.boundary,
        }
        if self.reason:
            out["reason"] = self.reason
        if witness:
            out["witness"] = _elide(self.witness)
            out["certificate"] = _elide(self.certificate)
        return out


def _traditional_once(b: Behavior, vm: VertexMatrix, exact: bool, eps: float) -> Verdict:
    A = vm.matrix()
    prob = LpProblem(np.zeros(vm.n_cols, dtype=np.int64), A, b.vector())
    sol = solve(prob, exact=exact, eps=eps)
    residual = sol.phase_one_residual if sol.phase_one_residual is not None else 0
    if sol.status is Status.INFEASIBLE:
        return Verdict(False, residual, exact, certificate=sol.y)
    return Verdict(True, residual, exact, witness=sol.x)


def is_noncontextual(b: Behavior, exact: bool = False, eps: float = DEFAULT_EPS,
                     cap: int = DEFAULT_CAP, adjudicate: bool = True) -> Verdict:
    """Feasibility of ``B = A lam`` with ``lam >= 0``."""
    vm = vertex_matrix(b.scenario, cap)
    if exact:
        return _traditional_once(b.as_exact(), vm, True, eps)
    v = _traditional_once(b, vm, False, eps)
    if adjudicate and near_threshold(v.margin, eps):
        w = _traditional_once(b.as_exact(), vm, True, eps)
        w.boundary = True
        return w
    return v


@dataclass(frozen=True, eq=False)
class ExtendedSystem:
    """Extended global distributions ``q`` constrained to reproduce a behavior on original contexts.

    ``shared`` lists the base measurements with two or more copies and
    ``equal[x]`` flags the columns where all copies of ``x`` agree.
    """

    extended: ExtendedScenario
    vertices: VertexMatrix
    shared: tuple[str, ...]
    equal: dict[str, np.ndarray]

    def constraint_matrix(self) -> np.ndarray:
        A = self.vertices.matrix()
        rows = np.concatenate([np.arange(self.vertices.offsets[i], self.vertices.offsets[i + 1])
                               for i in self.extended.original_contexts()])
        return A[rows]


def extended_system(s: Scenario, cap: int = DEFAULT_CAP) -> ExtendedSystem:
    e = extend(s)
    vm = vertex_matrix(e.ext, cap)
    assign = assignments(e.ext, cap)
    shared, equal = [], {}
    for x in s.measurements:
        where = s.contexts_of(x)
        if len(where) < 2:
            continue
        cols = [e.ext.measurements.index(f"{x}^{i}") for i in where]
        sub = assign[:, cols]
        shared.append(x)
        equal[x] = np.all(sub == sub[:, :1], axis=1).astype(np.int64)
    return ExtendedSystem(e, vm, tuple(shared), equal)


def mu_values(b: Behavior, system: ExtendedSystem) -> dict[str, Any]:
    return {x: mu(copy_marginals(system.extended, b, x)) for x in system.shared}


def coupling_deficit_problem(b: Behavior, system: ExtendedSystem) -> LpProblem:
    """Maximize total copy agreement over consistent extended global distributions (as a min)."""
    A = system.constraint_matrix()
    n = A.shape[1]
    agree = sum((system.equal[x] for x in system.shared), np.zeros(n, dtype=np.int64))
    return LpProblem(-agree, A, b.vector())


def _extended_maximal_once(b: Behavior, system: ExtendedSystem, exact: bool, eps: float) -> Verdict:
    mus = mu_values(b, system)
    total = sum(mus.values(), Fraction(0) if exact else 0.0)
    if not system.shared:
        return Verdict(True, total * 0, exact)
    sol = solve(coupling_deficit_problem(b, system), exact=exact, eps=eps)
    if sol.status is not Status.OPTIMAL:
        raise RuntimeError(f"extended LP unexpectedly {sol.status.value}")
    deficit = total + sol.value
    ok = bool(deficit == 0) if exact else bool(deficit <= eps)
    return Verdict(ok, deficit, exact, witness=sol.x, certificate=sol.y)


def _multimaximal_problem(b: Behavior, system: ExtendedSystem):
    A = system.constraint_matrix()
    rhs = list(b.vector())
    rows = [A]
    assign = assignments(system.extended.ext)
    for x in system.shared:
        where = system.extended.base.contexts_of(x)
        marg = copy_marginals(system.extended, b, x)
        table = multimaximal_coupling(marg)
        if isinstance(table, CouplingNonexistent):
            return None, f"no multimaximal coupling for {x!r}"
        cols = [system.extended.ext.measurements.index(f"{x}^{i}") for i in where]
        for size in range(2, len(cols) + 1):
            for sub in itertools.combinations(range(len(cols)), size):
                part = assign[:, [cols[j] for j in sub]]
                rows.append(np.all(part == part[:, :1], axis=1).astype(np.int64)[None, :])
                rhs.append(mu([marg[j] for j in sub]))
    M = np.vstack(rows)
    dtype = object if b.exact else np.float64
    return LpProblem(np.zeros(M.shape[1], dtype=np.int64), M, np.array(rhs, dtype=dtype)), ""


def _extended_multimaximal_once(b: Behavior, system: ExtendedSystem, exact: bool, eps: float) -> Verdict:
    prob, reason = _multimaximal_problem(b, system)
    if prob is None:
        return Verdict(False, float("inf"), exact, reason=reason)
    sol = solve(prob, exact=exact, eps=eps)
    residual = sol.phase_one_residual if sol.phase_one_residual is not None else 0
    if sol.status is Status.INFEASIBLE:
        return Verdict(False, residual, exact, certificate=sol.y)
    return Verdict(True, residual, exact, witness=sol.x)


def is_extended_noncontextual(b: Behavior, policy: CouplingPolicy = CouplingPolicy.MAXIMAL,
                              exact: bool = False, eps: float = DEFAULT_EPS, cap: int = DEFAULT_CAP,
                              adjudicate: bool = True, system: ExtendedSystem | None = None) -> Verdict:
    """Decide whether some extended global distribution reproduces ``b`` with the policy's couplings.

    Under the maximal policy this compares the best achievable total copy
    agreement with the sum of the maximal agreements, so no particular
    maximal coupling is ever fixed.
    """
    system = system or extended_system(b.scenario, cap)
    once = (_extended_maximal_once if CouplingPolicy(policy) is CouplingPolicy.MAXIMAL
            else _extended_multimaximal_once)
    if exact:
        return once(b.as_exact(), system, True, eps)
    v = once(b, system, False, eps)
    if adjudicate and not v.reason and near_threshold(v.margin, eps):
        w = once(b.as_exact(), system, True, eps)
        w.boundary = True
        return w
    return v


def _restriction(s: Scenario, i: int, shared: list[str]) -> np.ndarray:
    """0/1 map from context ``i``'s table onto the marginal table of ``shared``."""
    k = s.n_outcomes
    ctx = s.contexts[i]
    pos = [ctx.index(x) for x in shared]
    M = np.zeros((k ** len(shared), k ** len(ctx)), dtype=np.int64)
    for col, idx in enumerate(itertools.product(range(k), repeat=len(ctx))):
        row = 0
        for p in pos:
            row = row * k + idx[p]
        M[row, col] = 1
    return M


def nondisturbing_polytope(s: Scenario) -> tuple[np.ndarray, np.ndarray]:
    """Equality system over concatenated tables: normalization, then marginal agreement.

    Together with nonnegativity it cuts out the nondisturbing behaviors.
    """
    sizes = [s.table_size(i) for i in range(len(s.contexts))]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    width = int(offsets[-1])
    rows, rhs = [], []
    for i in range(len(s.contexts)):
        row = np.zeros(width, dtype=np.int64)
        row[offsets[i]:offsets[i + 1]] = 1
        rows.append(row)
        rhs.append(1)
    for i, j in itertools.combinations(range(len(s.contexts)), 2):
        shared = [x for x in s.contexts[i] if x in s.contexts[j]]
        if not shared:
            continue
        Mi, Mj = _restriction(s, i, shared), _restriction(s, j, shared)
        for a in range(Mi.shape[0]):
            row = np.zeros(width, dtype=np.int64)
            row[offsets[i]:offsets[i + 1]] = Mi[a]
            row[offsets[j]:offsets[j + 1]] -= Mj[a]
            rows.append(row)
            rhs.append(0)
    return np.array(rows, dtype=np.int64).reshape(-1, width), np.array(rhs, dtype=np.int64)
