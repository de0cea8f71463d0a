from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from contextuality.behavior import (Behavior, BehaviorError, from_correlators, from_dict, is_nondisturbing,
                                    make_behavior, marginal)
from contextuality.ncycle import correlators
from contextuality.scenario import path_scenario, n_cycle, validate


def test_marginal_of_uniform_is_uniform(path3):
    b = make_behavior(path3, [[0.25] * 4, [0.25] * 4])
    np.testing.assert_array_equal(marginal(b, 0, ["y"]), [0.5, 0.5])


def test_marginal_sums_out_first_measurement(path3):
    b = make_behavior(path3, [[0.1, 0.2, 0.3, 0.4], [0.25] * 4])
    np.testing.assert_allclose(marginal(b, 0, ["y"]), [0.4, 0.6])
    np.testing.assert_allclose(marginal(b, 0, ["x"]), [0.3, 0.7])


def test_marginal_perfect_correlation(path3):
    b = make_behavior(path3, [[0.5, 0, 0, 0.5], [0.5, 0, 0, 0.5]])
    np.testing.assert_array_equal(marginal(b, 1, ["z"]), [0.5, 0.5])


def test_marginal_reorders_subset(path3):
    b = make_behavior(path3, [[0.1, 0.2, 0.3, 0.4], [0.25] * 4])
    np.testing.assert_allclose(marginal(b, 0, ["y", "x"]), [0.1, 0.3, 0.2, 0.4])


def test_marginal_rejects_foreign_subset(path3):
    b = make_behavior(path3, [[0.25] * 4] * 2)
    with pytest.raises(ValueError):
        marginal(b, 0, ["z"])


def test_marginal_exact(path3):
    b = make_behavior(path3, [["1/3", "1/6", "1/4", "1/4"], ["1/4"] * 4], exact=True)
    assert list(marginal(b, 0, ["x"])) == [Fraction(1, 2), Fraction(1, 2)]


def test_nondisturbing_equal_y_marginals(path3):
    b = make_behavior(path3, [[0.1, 0.2, 0.3, 0.4], [0.2, 0.2, 0.5, 0.1]])
    assert is_nondisturbing(b).nondisturbing


def test_maximal_disturbance_reported(path3):
    b = make_behavior(path3, [[0, 1, 0, 0], [1, 0, 0, 0]])
    r = is_nondisturbing(b)
    assert not r
    assert r.max_violation == 1.0
    assert r.location == (0, 1, ("y",))


def test_pr_box_nondisturbing(pr_box):
    assert is_nondisturbing(pr_box).nondisturbing


def test_nondisturbance_tolerance(path3):
    b = make_behavior(path3, [[0.25, 0.25, 0.25, 0.25], [0.25 + 1e-8, 0.25, 0.25 - 1e-8, 0.25]])
    assert is_nondisturbing(b, tol=1e-7)
    assert not is_nondisturbing(b, tol=1e-9)


def test_validation_reports_context():
    s = path_scenario()
    with pytest.raises(BehaviorError) as exc:
        make_behavior(s, [[0.25, 0.25, 0.25, 0.23], [0.25] * 4])
    assert exc.value.violations[0][0] == "normalization"
    assert "context 0" in exc.value.violations[0][1]


def test_validation_clamps_tiny_negatives(path3):
    b = make_behavior(path3, [[0.5 + 1e-10, -1e-10, 0.25, 0.25], [0.25] * 4])
    assert b.tables[0][1] == 0.0


def test_validation_rejects_negative_and_length(path3):
    with pytest.raises(BehaviorError) as exc:
        make_behavior(path3, [[1.1, -0.1, 0, 0], [0.25] * 3])
    assert [k for k, _ in exc.value.violations] == ["negative", "normalization", "table-length"]


def test_exact_normalization_is_strict(path3):
    with pytest.raises(BehaviorError):
        make_behavior(path3, [["1/3", "1/3", "1/3", "1/1000000000000"], ["1/4"] * 4], exact=True)


def test_from_correlators_pr_box(pr_box):
    np.testing.assert_array_equal(pr_box.tables[0], [0.5, 0, 0, 0.5])
    np.testing.assert_array_equal(pr_box.tables[3], [0, 0.5, 0.5, 0])


def test_from_correlators_deterministic():
    b = from_correlators(4, [1] * 4, [1] * 4)
    for t in b.tables:
        np.testing.assert_array_equal(t, [0, 0, 0, 1])


def test_from_correlators_out_of_range():
    with pytest.raises(BehaviorError) as exc:
        from_correlators(5, [1, 1, 1, 1, -3], [0] * 5)
    assert "correlator-range" in [k for k, _ in exc.value.violations]


def test_from_correlators_infeasible_combination():
    with pytest.raises(BehaviorError) as exc:
        from_correlators(3, [-1, 0, 0], [1, 1, 0])
    assert "infeasible-correlators" in [k for k, _ in exc.value.violations]


def test_from_correlators_per_context_singles():
    b = from_correlators(3, [0, 0, 0], [0.5, 0, 0, 0, 0, -0.5])
    c = correlators(b)
    assert c.right[0] == 0.5
    assert c.left[0] == -0.5
    assert not is_nondisturbing(b)


correlator = st.fractions(min_value=-1, max_value=1, max_denominator=16)


@given(st.integers(3, 6).flatmap(lambda n: st.tuples(st.just(n), st.lists(correlator, min_size=3 * n, max_size=3 * n))))
def test_correlator_round_trip(data):
    n, vals = data
    pair, singles = vals[:n], vals[n:]
    try:
        b = from_correlators(n, pair, singles, exact=True)
    except BehaviorError:
        return
    c = correlators(b)
    assert list(c.pair) == pair
    assert c.flat_singles() == singles


@given(st.lists(st.floats(0.01, 1), min_size=8, max_size=8))
def test_marginal_nested_subsets(weights):
    s = validate(["a", "b", "c"], [["a", "b", "c"]], ["0", "1"])
    w = np.array(weights) / sum(weights)
    b = make_behavior(s, [list(w)])
    ab = marginal(b, 0, ["a", "b"])
    inner = Behavior(validate(["a", "b"], [["a", "b"]], ["0", "1"]), (ab,))
    np.testing.assert_allclose(marginal(inner, 0, ["b"]), marginal(b, 0, ["b"]), atol=1e-15)


@given(st.permutations(range(4)), st.integers(0, 2 ** 32 - 1))
def test_nondisturbance_invariant_under_context_order(perm, seed):
    rng = np.random.default_rng(seed)
    s = n_cycle(4)
    tables = [rng.dirichlet(np.ones(4)) for _ in range(4)]
    b = make_behavior(s, [list(t) for t in tables])
    s2 = validate(s.measurements, [s.contexts[i] for i in perm], s.outcomes.labels)
    b2 = make_behavior(s2, [list(tables[i]) for i in perm])
    r1, r2 = is_nondisturbing(b), is_nondisturbing(b2)
    assert r1.nondisturbing == r2.nondisturbing
    assert r1.max_violation == pytest.approx(r2.max_violation, abs=1e-15)


def test_json_round_trip_exact(path3):
    b = make_behavior(path3, [["1/3", "1/6", "1/4", "1/4"], ["1/4"] * 4], exact=True)
    d = b.to_dict()
    assert d["tables"][0][0] == "1/3"
    b2 = from_dict(d, exact=True)
    assert all(list(t1) == list(t2) for t1, t2 in zip(b.tables, b2.tables))


def test_rational_strings_in_float_mode(path3):
    b = from_dict({"scenario": path3.to_dict(), "tables": [["1/4"] * 4, [0.25] * 4]})
    assert b.tables[0][0] == 0.25


def test_as_exact_repairs_rounding_dust(path3):
    b = Behavior(path3, (np.array([0.1, 0.2, 0.3, 0.4]), np.array([0.7, 0.1, 0.1, 0.1])))
    e = b.as_exact()
    assert all(sum(t) == 1 for t in e.tables)
