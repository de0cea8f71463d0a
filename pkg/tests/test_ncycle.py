from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from contextuality.behavior import BehaviorError, make_behavior
from contextuality.ncycle import (
    CycleCorrelators, closed_form_quantifiers, correlators, coupling_correlator, cycle_order, excess,
    extended_criterion, s_function, s_function_exhaustive, traditional_criterion,
)
from contextuality.scenario import path_scenario, n_cycle


def test_s_examples():
    assert s_function([1, 1, 1, -1]) == 4
    assert s_function([1, 1, 1, 1]) == 2
    assert s_function([0]) == 0
    assert s_function([-3]) == 3 and s_function([3]) == -3


def test_s_empty():
    with pytest.raises(ValueError):
        s_function([])


@given(st.lists(st.fractions(-2, 2, max_denominator=7), min_size=1, max_size=10))
def test_s_matches_enumeration_exactly(z):
    assert s_function(z) == s_function_exhaustive(z)


def test_coupling_correlator():
    assert coupling_correlator(0, 0) == 1
    assert coupling_correlator(1, -1) == -1
    assert coupling_correlator(Fraction(1, 2), Fraction(-1, 4)) == Fraction(1, 4)
    with pytest.raises(ValueError):
        coupling_correlator(1.5, 0)


def test_pr_box(pr_box):
    c = correlators(pr_box)
    assert c.pair == (1, 1, 1, -1)
    r = extended_criterion(c)
    assert not r.noncontextual and r.s == 8 and r.bound == 6 and r.excess == 2
    t = traditional_criterion(c)
    assert not t.noncontextual and t.s == 4 and t.bound == 2
    assert closed_form_quantifiers(c) == {"Negativity": 1, "L1Uniform": 1, "Mu": 1}


def test_deterministic_noncontextual():
    c = CycleCorrelators.from_flat(5, [1] * 5, [1] * 5)
    assert extended_criterion(c).noncontextual


def test_exact_boundary():
    h = Fraction(1, 3)
    c = CycleCorrelators.from_flat(4, [1] * 4, [h] * 4)
    r = extended_criterion(c)
    assert r.noncontextual and r.boundary and r.s == 6 and r.excess == 0


def test_float_boundary_flag():
    r = extended_criterion(CycleCorrelators.from_flat(4, [1.0] * 4, [0.25] * 4))
    assert r.noncontextual and r.boundary


def test_invalid_correlators():
    with pytest.raises(ValueError):
        CycleCorrelators.from_flat(4, [1, 1, 1, -3], [0] * 4)
    with pytest.raises(ValueError):
        CycleCorrelators.from_flat(3, [-1, 0, 0], [1, 1, 0])
    with pytest.raises(ValueError):
        CycleCorrelators.from_flat(4, [0] * 4, [0] * 5)


def test_round_trip_through_behavior():
    c = CycleCorrelators.from_flat(3, [Fraction(1, 2), 0, Fraction(-1, 4)],
                                   [0, Fraction(1, 4), Fraction(1, 8), 0, 0, Fraction(-1, 2)])
    back = correlators(c.to_behavior(exact=True))
    assert back == c
    assert not back.nondisturbing


def test_extended_vector_layout():
    c = CycleCorrelators.from_flat(3, [0.1, 0.2, 0.3], [0, 0.5, 0, 0, 0, 0])
    # coupling of measurement 1: right[1] = 0, left[1] = 0.5
    assert c.extended_vector() == [0.1, 0.5, 0.2, 1.0, 0.3, 1.0]


def test_excess_traditional_vs_extended(pr_box):
    c = correlators(pr_box)
    assert excess(c, extended=False) == 2 and excess(c) == 2


def test_cycle_order():
    assert cycle_order(n_cycle(4)) == ["0", "1", "2", "3"]
    assert cycle_order(path_scenario()) is None
    with pytest.raises(BehaviorError):
        correlators(make_behavior(path_scenario(), [[0.25] * 4] * 2))


def test_large_k_enumeration(rng):
    for _ in range(20):
        z = rng.uniform(-1, 1, size=12)
        assert s_function(z) == pytest.approx(s_function_exhaustive(z), abs=1e-12)
