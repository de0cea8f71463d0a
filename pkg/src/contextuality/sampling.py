"""Seeded random behaviors for sweeps and property tests.

All probabilities are dyadic rationals (Dirichlet draws rounded to a
``2**-16`` grid, mixing weights to ``2**-10``), so every float behavior here
converts to the identical rational behavior and exact re-checks see the
same data, including exact nondisturbance.
"""

from __future__ import annotations

import numpy as np

from dataclasses import dataclass

from .behavior import Behavior
from .lp import LpProblem, Status, solve
from .polytope import DEFAULT_CAP, VertexMatrix, is_noncontextual, nondisturbing_polytope, vertex_matrix
from .scenario import Scenario

MAX_SUPPORT = 8
POOL_TRIES = 400
VERTEX_GRID = 2 ** 20
PROB_BITS = 16
WEIGHT_BITS = 10


def dyadic_dirichlet(size: int, rng: np.random.Generator, bits: int = PROB_BITS) -> np.ndarray:
    """Dirichlet(1, ..., 1) rounded to multiples of ``2**-bits`` summing to exactly 1."""
    scale = 2 ** bits
    raw = rng.dirichlet(np.ones(size)) * scale
    ints = np.floor(raw).astype(np.int64)
    short = scale - int(ints.sum())
    if short:
        ints[np.argsort(-(raw - ints), kind="stable")[:short]] += 1
    return ints / scale


def dyadic_weight(upper: float, rng: np.random.Generator, bits: int = WEIGHT_BITS) -> float:
    """Uniform draw below ``upper`` rounded down to a multiple of ``2**-bits``."""
    scale = 2 ** bits
    return float(np.floor(rng.uniform() * upper * scale)) / scale


def dirichlet_behavior(s: Scenario, rng: np.random.Generator) -> Behavior:
    """Independent Dirichlet(1, ..., 1) table per context; generically disturbing."""
    return Behavior(s, tuple(dyadic_dirichlet(s.table_size(i), rng) for i in range(len(s.contexts))))


def _sparse_global(n_cols: int, rng: np.random.Generator) -> np.ndarray:
    size = int(rng.integers(1, min(n_cols, MAX_SUPPORT) + 1))
    support = rng.choice(n_cols, size=size, replace=False)
    q = np.zeros(n_cols)
    q[support] = dyadic_dirichlet(size, rng)
    return q


def _split(s: Scenario, flat: np.ndarray, offsets) -> Behavior:
    return Behavior(s, tuple(flat[offsets[i]:offsets[i + 1]] for i in range(len(s.contexts))))


def quasi_mixture_behavior(s: Scenario, rng: np.random.Generator, vm: VertexMatrix | None = None,
                           cap: int = DEFAULT_CAP) -> Behavior:
    """Marginals of a random signed global distribution ``(1 + t) q1 - t q2``.

    Any signed global distribution has agreeing marginals, so the result is
    nondisturbing; ``t`` is drawn below the largest value keeping every
    table nonnegative.
    """
    vm = vm or vertex_matrix(s, cap)
    A = vm.matrix(np.float64)
    q1, q2 = _sparse_global(vm.n_cols, rng), _sparse_global(vm.n_cols, rng)
    base, step = A.dot(q1), A.dot(q1 - q2)
    down = step < 0
    t_max = float(np.min(base[down] / -step[down])) if down.any() else 1.0
    t = dyadic_weight(t_max, rng)
    flat = base + t * step
    while flat.min() < 0:  # t_max is a float estimate; step back onto the grid
        t -= 2.0 ** -WEIGHT_BITS
        flat = base + t * step
    return _split(s, flat, vm.offsets)


@dataclass(frozen=True, eq=False)
class NondisturbingSampler:
    """Mixtures ``w V + (1 - w) N`` of a nondisturbing vertex ``V`` and a noncontextual ``N``.

    ``contextual`` pools the contextual vertices found by maximizing random
    objectives over the nondisturbing polytope; when the pool is empty (every
    nondisturbing behavior is noncontextual) random vertices are used instead.
    """

    scenario: Scenario
    vertices: VertexMatrix
    system: tuple[np.ndarray, np.ndarray]
    contextual: tuple[np.ndarray, ...]

    @classmethod
    def build(cls, s: Scenario, rng: np.random.Generator, tries: int = POOL_TRIES,
              cap: int = DEFAULT_CAP) -> "NondisturbingSampler":
        vm = vertex_matrix(s, cap)
        system = nondisturbing_polytope(s)
        found: dict[bytes, np.ndarray] = {}
        for _ in range(tries):
            v = _nd_vertex(s, system, rng)
            if v is None or v.tobytes() in found:
                continue
            if not is_noncontextual(_split(s, v, vm.offsets), adjudicate=False).noncontextual:
                found[v.tobytes()] = v
        pool = tuple(found[key] for key in sorted(found))
        return cls(s, vm, system, pool)

    def vertex(self, rng: np.random.Generator) -> np.ndarray:
        if self.contextual:
            return self.contextual[int(rng.integers(len(self.contextual)))]
        v = None
        while v is None:
            v = _nd_vertex(self.scenario, self.system, rng)
        return v

    def sample(self, rng: np.random.Generator) -> Behavior:
        A = self.vertices.matrix(np.float64)
        w = dyadic_weight(1.0, rng)
        flat = w * self.vertex(rng) + (1 - w) * A.dot(_sparse_global(self.vertices.n_cols, rng))
        return _split(self.scenario, flat, self.vertices.offsets)


def _nd_vertex(s: Scenario, system: tuple[np.ndarray, np.ndarray], rng: np.random.Generator) -> np.ndarray | None:
    """Vertex of the nondisturbing polytope maximizing a Gaussian objective, snapped to a dyadic grid.

    Returns None when snapping breaks normalization or marginal agreement.
    """
    M, rhs = system
    sol = solve(LpProblem(rng.standard_normal(M.shape[1]), M, rhs))
    if sol.status is not Status.OPTIMAL:
        return None
    v = np.round(np.asarray(sol.x, dtype=np.float64) * VERTEX_GRID) / VERTEX_GRID
    if v.min() < 0 or np.any(M.dot(v) != rhs):
        return None
    return v


def nondisturbing_behavior(s: Scenario, rng: np.random.Generator, sampler: NondisturbingSampler | None = None,
                           cap: int = DEFAULT_CAP) -> Behavior:
    sampler = sampler or NondisturbingSampler.build(s, rng, cap=cap)
    return sampler.sample(rng)


def deterministic_behavior(s: Scenario, rng: np.random.Generator) -> Behavior:
    k = s.n_outcomes
    values = {x: int(rng.integers(k)) for x in s.measurements}
    tables = []
    for ctx in s.contexts:
        idx = 0
        for x in ctx:
            idx = idx * k + values[x]
        t = np.zeros(k ** len(ctx))
        t[idx] = 1.0
        tables.append(t)
    return Behavior(s, tuple(tables))


def disturb(b: Behavior, delta: float, rng: np.random.Generator) -> Behavior:
    """Mix one context's table with a fresh Dirichlet table at weight ``delta``.

    The chosen table moves by at most ``delta`` in total variation, so every
    shared marginal it feeds moves by at most ``delta`` too. ``delta`` is
    rounded down to the weight grid.
    """
    if delta <= 0:
        return b
    delta = float(np.floor(delta * 2 ** WEIGHT_BITS)) / 2 ** WEIGHT_BITS
    s = b.scenario
    shared = [i for i, ctx in enumerate(s.contexts) if any(len(s.contexts_of(x)) > 1 for x in ctx)]
    pick = int(rng.choice(shared)) if shared else int(rng.integers(len(s.contexts)))
    tables = list(b.tables)
    fresh = dyadic_dirichlet(len(tables[pick]), rng)
    tables[pick] = (1 - delta) * tables[pick] + delta * fresh
    return Behavior(s, tuple(tables))


def mixed_behavior(s: Scenario, rng: np.random.Generator, sampler: NondisturbingSampler | None = None) -> Behavior:
    """One draw from a blend of samplers, for sweeps that need every regime.

    Roughly: nondisturbing vertex mixtures, the same with small or large
    disturbance, signed-mixture marginals, independent Dirichlet tables,
    and deterministic points.
    """
    sampler = sampler or NondisturbingSampler.build(s, rng)
    u = float(rng.uniform())
    if u < 0.35:
        return sampler.sample(rng)
    if u < 0.6:
        return disturb(sampler.sample(rng), float(rng.uniform(0, 0.1)), rng)
    if u < 0.7:
        return disturb(sampler.sample(rng), float(rng.uniform(0.1, 1.0)), rng)
    if u < 0.8:
        return quasi_mixture_behavior(s, rng, sampler.vertices)
    if u < 0.95:
        return dirichlet_behavior(s, rng)
    return deterministic_behavior(s, rng)
