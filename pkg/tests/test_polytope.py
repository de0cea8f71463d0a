import numpy as np
import pytest
from scipy.optimize import linprog

from contextuality.behavior import from_correlators, is_nondisturbing, make_behavior
from contextuality.coupling import CouplingPolicy
from contextuality.extension import extend
from contextuality.lp import Status, solve
from contextuality.polytope import (
    VertexCapError, extended_system, is_extended_noncontextual, is_noncontextual, near_threshold,
    nondisturbing_polytope, quasi_global_matrix, vertex_count, vertex_matrix,
)
from contextuality.sampling import NondisturbingSampler, deterministic_behavior, dirichlet_behavior
from contextuality.scenario import make_scenario, n_cycle


def test_column_counts(path3):
    assert vertex_matrix(extend(path3).ext).n_cols == 16
    assert vertex_matrix(n_cycle(5)).n_cols == 32
    assert vertex_count(extend(n_cycle(5)).ext) == 1024
    single = make_scenario(["x"], [["x"]], ["0", "1"])
    vm = vertex_matrix(single)
    np.testing.assert_array_equal(vm.matrix(), [[1, 0], [0, 1]])


def test_columns_are_deterministic_behaviors():
    vm = vertex_matrix(n_cycle(4))
    A = vm.matrix()
    assert set(np.unique(A)) <= {0, 1}
    for i in range(4):
        np.testing.assert_array_equal(A[vm.context_rows(i)].sum(axis=0), 1)
    assert vm.assignment(0) == ("-1",) * 4 and vm.assignment(1) == ("-1", "-1", "-1", "+1")


def test_cap():
    with pytest.raises(VertexCapError) as err:
        vertex_matrix(n_cycle(5), cap=31)
    assert err.value.required == 32


def test_deterministic_noncontextual_with_basis_witness(rng):
    s = n_cycle(4)
    b = deterministic_behavior(s, rng)
    v = is_noncontextual(b, exact=True)
    assert v.noncontextual
    w = np.array(v.witness)
    assert sorted(w) == [0] * 15 + [1]


def test_pr_box_contextual(pr_box, pr_box_exact):
    assert not is_noncontextual(pr_box).noncontextual
    assert not is_noncontextual(pr_box_exact, exact=True).noncontextual


def test_uniform_noncontextual(uniform_cycle4, path3):
    assert is_noncontextual(uniform_cycle4).noncontextual
    assert is_noncontextual(make_behavior(path3, [[0.25] * 4] * 2)).noncontextual


def _highs_feasible(A, b):
    return linprog(np.zeros(A.shape[1]), A_eq=A, b_eq=b, bounds=(0, None), method="highs").status == 0


def test_traditional_verdicts_against_highs(rng):
    s = n_cycle(4)
    sampler = NondisturbingSampler.build(s, rng, tries=100)
    A = vertex_matrix(s).matrix(np.float64)
    for _ in range(40):
        b = sampler.sample(rng)
        assert is_noncontextual(b).noncontextual == _highs_feasible(A, b.vector())


def test_path3_always_extended_noncontextual(path3, rng):
    system = extended_system(path3)
    for _ in range(50):
        assert is_extended_noncontextual(dirichlet_behavior(path3, rng), system=system).noncontextual


def test_pr_box_extended_contextual(pr_box):
    v = is_extended_noncontextual(pr_box)
    assert not v.noncontextual
    assert v.margin == pytest.approx(1.0)  # coupling deficit, half the cycle excess


def test_extended_equals_traditional_for_nondisturbing(rng):
    s = n_cycle(4)
    sampler = NondisturbingSampler.build(s, rng, tries=100)
    system = extended_system(s)
    for _ in range(40):
        b = sampler.sample(rng)
        assert is_nondisturbing(b).nondisturbing
        assert is_extended_noncontextual(b, system=system).noncontextual == is_noncontextual(b).noncontextual


def test_multimaximal_policy_agrees_on_cycles(rng):
    # with two copies per measurement the two policies coincide
    s = n_cycle(4)
    system = extended_system(s)
    for _ in range(15):
        b = dirichlet_behavior(s, rng)
        a = is_extended_noncontextual(b, system=system)
        m = is_extended_noncontextual(b, CouplingPolicy.MULTIMAXIMAL, system=system)
        assert a.noncontextual == m.noncontextual


def test_boundary_is_adjudicated_exactly():
    # pair all 1 with equal singles: extended s sits exactly on the bound
    b = from_correlators(4, [1, 1, 1, 1], [0.5] * 4)
    v = is_extended_noncontextual(b)
    assert v.noncontextual


def test_near_threshold_window():
    assert near_threshold(1e-7, 1e-7) and near_threshold(5e-7, 1e-7)
    assert not near_threshold(1e-13, 1e-7) and not near_threshold(1e-5, 1e-7)


def test_quasi_system(pr_box, uniform_cycle4):
    qs = quasi_global_matrix(n_cycle(4))
    sol = solve(qs.problem(pr_box))
    assert sol.status is Status.OPTIMAL
    q = qs.quasi(sol.x)
    A = vertex_matrix(n_cycle(4)).matrix(np.float64)
    np.testing.assert_allclose(A.dot(q), pr_box.vector(), atol=1e-9)
    assert q.min() < 0  # no nonnegative solution exists for the PR box


def test_quasi_single_context():
    s = make_scenario(["x", "y"], [["x", "y"]], ["0", "1"])
    b = make_behavior(s, [[0.1, 0.2, 0.3, 0.4]])
    qs = quasi_global_matrix(s)
    np.testing.assert_allclose(qs.quasi(solve(qs.problem(b)).x), b.vector(), atol=1e-12)


def test_nondisturbing_polytope_membership(pr_box, rng):
    M, rhs = nondisturbing_polytope(n_cycle(4))
    np.testing.assert_allclose(M.dot(pr_box.vector()), rhs, atol=1e-12)
    b = dirichlet_behavior(n_cycle(4), rng)
    assert not np.allclose(M.dot(b.vector()), rhs)


def test_verdict_json(pr_box):
    d = is_noncontextual(pr_box).to_dict(witness=False)
    assert d["verdict"] == "contextual" and "witness" not in d
