"""Contextuality quantifiers, each a single linear program.

Every quantifier vanishes exactly on the behaviors its decision procedure
calls noncontextual. Float runs whose value lands within ten tolerances of
zero are re-solved in exact arithmetic before reporting.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable

import numpy as np

from .behavior import Behavior
from .coupling import CouplingPolicy
from .extension import extend, lift_behavior
from .lp import DEFAULT_EPS, LpProblem, LpSolution, Status, solve
from .polytope import (DEFAULT_CAP, ExtendedSystem, _num, coupling_deficit_problem, extended_system,
                       mu_values, quasi_global_matrix, vertex_matrix)


class Measure(str, enum.Enum):
    CF = "CF"
    NEGATIVITY = "Negativity"
    L1_UNIFORM = "L1Uniform"
    L1_MAX = "L1Max"
    L1_TOTAL = "L1Total"
    MU = "Mu"
    M = "M"


CLI_NAMES = {
    "cf": Measure.CF,
    "neg": Measure.NEGATIVITY,
    "l1u": Measure.L1_UNIFORM,
    "l1max": Measure.L1_MAX,
    "l1tot": Measure.L1_TOTAL,
    "mu": Measure.MU,
    "m": Measure.M,
}


class L1Flavor(str, enum.Enum):
    UNIFORM = "uniform"
    MAX = "max"
    TOTAL = "total"


@dataclass
class QuantifierReport:
    name: Measure
    value: Any
    exact: bool
    verified_exact: bool = False
    witness: dict[str, Any] = field(default_factory=dict, repr=False)

    def __float__(self) -> float:
        return float(self.value)

    def to_dict(self, witness: bool = False) -> dict[str, Any]:
        v = self.value
        if isinstance(v, float) and math.isinf(v):
            v = "inf"
        else:
            v = _num(v)
        out = {"name": self.name.value, "value": v, "exact": self.exact,
               "verified_exact": self.verified_exact}
        if witness:
            out["witness"] = {k: (None if w is None else [_num(x) for x in w]) if k != "note" else w
                              for k, w in self.witness.items()}
        return out


# each builder returns (problem, finish) where finish(solution) -> (value, witness)
Builder = Callable[[Behavior, bool], tuple[LpProblem, Callable[[LpSolution], tuple[Any, dict]]]]


def _zero(exact: bool):
    return Fraction(0) if exact else 0.0


def _run(name: Measure, builder: Builder, b: Behavior, exact: bool, eps: float, verify: bool) -> QuantifierReport:
    if exact:
        b = b.as_exact()
    problem, finish = builder(b, exact)
    sol = solve(problem, exact=exact, eps=eps)
    value, wit = finish(sol)
    report = QuantifierReport(name, value if exact else float(value), exact, exact, wit)
    if not exact and verify and abs(report.value) < 10 * eps:
        be = b.as_exact()
        problem, finish = builder(be, True)
        value, wit = finish(solve(problem, exact=True, eps=eps))
        if isinstance(value, float) and math.isinf(value):
            # rounding broke exact marginal agreement; the float verdict stands unverified
            return report
        report = QuantifierReport(name, float(value), False, True, wit)
    return report


def _expect_optimal(sol: LpSolution, what: str) -> None:
    if sol.status is not Status.OPTIMAL:
        raise RuntimeError(f"{what} LP unexpectedly {sol.status.value}")


def _cf_builder(cap: int) -> Builder:
    def build(b: Behavior, exact: bool):
        A = vertex_matrix(b.scenario, cap).matrix()
        r, n = A.shape
        M = np.hstack([A, np.eye(r, dtype=np.int64)])
        c = np.concatenate([-np.ones(n, dtype=np.int64), np.zeros(r, dtype=np.int64)])

        def finish(sol: LpSolution):
            _expect_optimal(sol, "contextual fraction")
            return 1 + sol.value, {"noncontextual_weights": sol.x[:n]}
        return LpProblem(c, M, b.vector()), finish
    return build


def contextual_fraction(b: Behavior, exact: bool = False, eps: float = DEFAULT_EPS,
                        cap: int = DEFAULT_CAP, verify: bool = True) -> QuantifierReport:
    """Smallest weight of a contextual part: ``1 -`` the largest subnormalized noncontextual part."""
    return _run(Measure.CF, _cf_builder(cap), b, exact, eps, verify)


def _negativity_builder(cap: int) -> Builder:
    def build(b: Behavior, exact: bool):
        system = quasi_global_matrix(b.scenario, cap)

        def finish(sol: LpSolution):
            if sol.status is Status.INFEASIBLE:
                return float("inf"), {"certificate": sol.y, "note": "no signed global distribution (disturbing)"}
            _expect_optimal(sol, "negativity")
            return sol.value - 1, {"quasi_distribution": system.quasi(sol.x)}
        return system.problem(b), finish
    return build


def negativity(b: Behavior, exact: bool = False, eps: float = DEFAULT_EPS,
               cap: int = DEFAULT_CAP, verify: bool = True) -> QuantifierReport:
    """Least ``sum |q| - 1`` over signed global distributions reproducing ``b``.

    Disturbing behaviors admit no such distribution and get ``inf``.
    """
    return _run(Measure.NEGATIVITY, _negativity_builder(cap), b, exact, eps, verify)


def _l1_builder(flavor: L1Flavor, cap: int) -> Builder:
    def build(b: Behavior, exact: bool):
        vm = vertex_matrix(b.scenario, cap)
        A = vm.matrix()
        r, n = A.shape
        N = len(b.scenario.contexts)
        eye = np.eye(r, dtype=np.int64)
        top = np.hstack([A, eye, -eye])
        norm = np.concatenate([np.ones(n, dtype=np.int64), np.zeros(2 * r, dtype=np.int64)])[None, :]
        M = np.vstack([top, norm])
        rhs = list(b.vector()) + [1]
        if flavor is L1Flavor.MAX:
            # per context: sum of |deviation| + slack = t
            block = np.zeros((N, M.shape[1]), dtype=np.int64)
            for i in range(N):
                rows = vm.context_rows(i)
                block[i, n + rows.start:n + rows.stop] = 1
                block[i, n + r + rows.start:n + r + rows.stop] = 1
            extra = np.hstack([-np.ones((N, 1), dtype=np.int64), np.eye(N, dtype=np.int64)])
            M = np.vstack([np.hstack([M, np.zeros((M.shape[0], N + 1), dtype=np.int64)]),
                           np.hstack([block, extra])])
            rhs += [0] * N
            c = np.zeros(M.shape[1], dtype=np.int64)
            c[n + 2 * r] = 1
        else:
            c = np.concatenate([np.zeros(n, dtype=np.int64), np.ones(2 * r, dtype=np.int64)])
        scale = Fraction(1, N) if exact else 1.0 / N

        def finish(sol: LpSolution):
            _expect_optimal(sol, "l1 distance")
            nearest = A.dot(sol.x[:n])
            value = sol.value * scale if flavor is L1Flavor.UNIFORM else sol.value
            return value, {"nearest_noncontextual": nearest, "weights": sol.x[:n]}
        dtype = object if exact else np.float64
        return LpProblem(c, M, np.array(rhs, dtype=dtype)), finish
    return build


_L1_NAMES = {L1Flavor.UNIFORM: Measure.L1_UNIFORM, L1Flavor.MAX: Measure.L1_MAX, L1Flavor.TOTAL: Measure.L1_TOTAL}


def l1_distance(b: Behavior, flavor: L1Flavor | str = L1Flavor.UNIFORM, exact: bool = False,
                eps: float = DEFAULT_EPS, cap: int = DEFAULT_CAP, verify: bool = True) -> QuantifierReport:
    """l1 distance to the noncontextual set.

    ``uniform`` averages the per-context l1 distances over contexts, ``max``
    takes the worst context, ``total`` sums over all contexts.
    """
    flavor = L1Flavor(flavor)
    return _run(_L1_NAMES[flavor], _l1_builder(flavor, cap), b, exact, eps, verify)


def _mu_builder(cap: int, system: ExtendedSystem | None) -> Builder:
    def build(b: Behavior, exact: bool):
        sys_ = system or extended_system(b.scenario, cap)
        total = sum(mu_values(b, sys_).values(), _zero(exact))

        def finish(sol: LpSolution):
            _expect_optimal(sol, "coupling deficit")
            return total + sol.value, {"extended_distribution": sol.x}
        return coupling_deficit_problem(b, sys_), finish
    return build


def mu_deficit(b: Behavior, exact: bool = False, eps: float = DEFAULT_EPS, cap: int = DEFAULT_CAP,
               verify: bool = True, system: ExtendedSystem | None = None) -> QuantifierReport:
    """Sum over shared measurements of maximal copy agreement, minus the best jointly achievable sum."""
    return _run(Measure.MU, _mu_builder(cap, system), b, exact, eps, verify)


def _m_builder(cap: int, system: ExtendedSystem | None) -> Builder:
    def build(b: Behavior, exact: bool):
        sys_ = system or extended_system(b.scenario, cap)
        mus = mu_values(b, sys_)
        A = sys_.constraint_matrix()
        r, n = A.shape
        k = len(sys_.shared)
        # columns: q (n), t, slack per shared measurement (k)
        top = np.hstack([A, np.zeros((r, 1 + k), dtype=np.int64)])
        rows = [top]
        for j, x in enumerate(sys_.shared):
            row = np.zeros(n + 1 + k, dtype=np.int64)
            row[:n] = sys_.equal[x]
            row[n] = 1
            row[n + 1 + j] = -1
            rows.append(row[None, :])
        M = np.vstack(rows)
        rhs = list(b.vector()) + [mus[x] for x in sys_.shared]
        c = np.zeros(n + 1 + k, dtype=np.int64)
        c[n] = 1

        def finish(sol: LpSolution):
            _expect_optimal(sol, "max coupling deficit")
            return sol.value, {"extended_distribution": sol.x[:n]}
        if k == 0:
            M, rhs, c = np.hstack([A, np.zeros((r, 1), dtype=np.int64)]), list(b.vector()), c[:n + 1]
        dtype = object if exact else np.float64
        return LpProblem(c, M, np.array(rhs, dtype=dtype)), finish
    return build


def m_deficit(b: Behavior, exact: bool = False, eps: float = DEFAULT_EPS, cap: int = DEFAULT_CAP,
              verify: bool = True, system: ExtendedSystem | None = None) -> QuantifierReport:
    """Smallest achievable worst-case coupling deficit, via the epigraph of the max."""
    return _run(Measure.M, _m_builder(cap, system), b, exact, eps, verify)


def m_values(b: Behavior, q: np.ndarray, system: ExtendedSystem) -> dict[str, Any]:
    """Copy-agreement probabilities of each shared measurement under an extended distribution ``q``."""
    return {x: system.equal[x].dot(q) for x in system.shared}


def quantify(b: Behavior, measures: Iterable[Measure | str] = tuple(Measure), extended: bool = False,
             policy: CouplingPolicy = CouplingPolicy.MAXIMAL, exact: bool = False, eps: float = DEFAULT_EPS,
             cap: int = DEFAULT_CAP) -> list[QuantifierReport]:
    """Evaluate several quantifiers.

    With ``extended`` the distance-type quantifiers run on the lifted behavior
    over the extended scenario. The coupling deficits always work from the
    base behavior since they range over every extended distribution anyway.
    """
    measures = [Measure(m) for m in measures]
    target = b
    if extended and any(m not in (Measure.MU, Measure.M) for m in measures):
        target = lift_behavior(extend(b.scenario), b, policy, eps=eps)
    system = None
    if Measure.MU in measures or Measure.M in measures:
        system = extended_system(b.scenario, cap)
    out = []
    for m in measures:
        if m is Measure.CF:
            out.append(contextual_fraction(target, exact, eps, cap))
        elif m is Measure.NEGATIVITY:
            out.append(negativity(target, exact, eps, cap))
        elif m is Measure.L1_UNIFORM:
            out.append(l1_distance(target, L1Flavor.UNIFORM, exact, eps, cap))
        elif m is Measure.L1_MAX:
            out.append(l1_distance(target, L1Flavor.MAX, exact, eps, cap))
        elif m is Measure.L1_TOTAL:
            out.append(l1_distance(target, L1Flavor.TOTAL, exact, eps, cap))
        elif m is Measure.MU:
            out.append(mu_deficit(b, exact, eps, cap, system=system))
        else:
            out.append(m_deficit(b, exact, eps, cap, system=system))
    return out
