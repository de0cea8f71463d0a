import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from contextuality.behavior import BehaviorError, from_correlators, make_behavior, marginal
from contextuality.coupling import CouplingPolicy, mu
from contextuality.extension import (
    Coupling, Original, copy_marginals, extend, from_dict, lift_behavior, restrict_to_original,
)
from contextuality.ncycle import correlators
from contextuality.scenario import make_scenario, n_cycle
from contextuality.sampling import dirichlet_behavior


def test_path3_structure(path3):
    e = extend(path3)
    assert set(e.ext.measurements) == {"x^0", "y^0", "y^1", "z^1"}
    assert [set(c) for c in e.ext.contexts] == [{"x^0", "y^0"}, {"y^1", "z^1"}, {"y^0", "y^1"}]
    assert e.context_kind == (Original(0), Original(1), Coupling("y"))
    assert e.coupling_context_of("y") == 2 and e.coupling_context_of("x") is None


def test_five_cycle_becomes_ten_cycle():
    e = extend(n_cycle(5))
    assert len(e.ext.measurements) == 10 and len(e.ext.contexts) == 10
    assert all(len(c) == 2 for c in e.ext.contexts)
    # every copy sits in exactly two contexts and the hypergraph is connected
    assert all(len(e.ext.contexts_of(x)) == 2 for x in e.ext.measurements)
    seen, todo = set(), [e.ext.measurements[0]]
    while todo:
        x = todo.pop()
        if x in seen:
            continue
        seen.add(x)
        todo += [y for i in e.ext.contexts_of(x) for y in e.ext.contexts[i]]
    assert len(seen) == 10


def test_single_context_has_no_couplings():
    s = make_scenario(["x", "y"], [["x", "y"]], ["0", "1"])
    e = extend(s)
    assert e.coupling_contexts() == []
    assert e.ext.contexts == (("x^0", "y^0"),)


def test_round_trip(path3):
    e = extend(path3)
    again = from_dict(json.loads(json.dumps(e.to_dict())))
    assert again.ext == e.ext and again.context_kind == e.context_kind and again.base == e.base


def test_lift_equal_marginals_is_diagonal(path3):
    b = make_behavior(path3, [[0.1, 0.2, 0.3, 0.4], [0.25, 0.15, 0.5, 0.1]])
    lifted = lift_behavior(extend(path3), b)
    np.testing.assert_allclose(lifted.tables[2], [0.4, 0, 0, 0.6], atol=1e-15)


def test_lift_disjoint_supports(path3):
    b = make_behavior(path3, [[0, 0.5, 0, 0.5], [0.5, 0.5, 0, 0]])
    lifted = lift_behavior(extend(path3), b)
    np.testing.assert_array_equal(lifted.tables[2], [0, 0, 1, 0])


def test_originals_bit_identical_and_restriction(rng):
    s = n_cycle(4)
    e = extend(s)
    for _ in range(20):
        b = dirichlet_behavior(s, rng)
        lifted = lift_behavior(e, b)
        back = restrict_to_original(e, lifted)
        for t0, t1 in zip(b.tables, back.tables):
            assert t0.tobytes() == t1.tobytes()
        for x in s.measurements:
            table = lifted.tables[e.coupling_context_of(x)]
            k = e.coupling_context_of(x)
            assert np.diag(table.reshape(2, 2)).sum() == pytest.approx(float(mu(copy_marginals(e, b, x))))
            for j, ctx_i in enumerate(s.contexts_of(x)):
                np.testing.assert_allclose(marginal(lifted, k, [f"{x}^{ctx_i}"]),
                                           marginal(b, ctx_i, [x]), atol=1e-12)


def test_lifted_behavior_is_nondisturbing(rng):
    from contextuality.behavior import is_nondisturbing
    s = n_cycle(5)
    e = extend(s)
    for _ in range(10):
        assert is_nondisturbing(lift_behavior(e, dirichlet_behavior(s, rng))).nondisturbing


@given(st.lists(st.floats(-0.5, 0.5), min_size=4, max_size=4), st.lists(st.floats(-0.25, 0.25), min_size=8, max_size=8))
def test_coupling_correlator_matches_lift(pair, singles):
    b = from_correlators(4, pair, singles)
    c = correlators(b)
    e = extend(b.scenario)
    lifted = lift_behavior(e, b)
    for j, x in enumerate(b.scenario.measurements):
        t = lifted.tables[e.coupling_context_of(x)]
        corr = t[0] - t[1] - t[2] + t[3]
        assert corr == pytest.approx(1 - abs(c.left[j] - c.right[j]), abs=1e-12)


def test_lift_rejects_foreign_behavior(path3):
    b = make_behavior(n_cycle(3), [[0.25] * 4] * 3)
    with pytest.raises(BehaviorError):
        lift_behavior(extend(path3), b)


def test_multimaximal_lift_on_pairs_matches_maximal(rng):
    s = n_cycle(4)
    e = extend(s)
    b = dirichlet_behavior(s, rng)
    a = lift_behavior(e, b, CouplingPolicy.MAXIMAL)
    m = lift_behavior(e, b, CouplingPolicy.MULTIMAXIMAL)
    for i in e.coupling_contexts():
        t1, t2 = a.tables[i], m.tables[i]
        assert t1[0] + t1[3] == pytest.approx(t2[0] + t2[3])
