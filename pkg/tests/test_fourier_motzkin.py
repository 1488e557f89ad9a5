from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from nicelie.fourier_motzkin import Inequality, eliminate_all, feasible, sample_point

from oracles import lp_vertex_feasible


def systems(max_vars: int, max_rows: int):
    return st.integers(min_value=1, max_value=max_vars).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.lists(st.tuples(st.lists(st.integers(-2, 2), min_size=n, max_size=n),
                               st.integers(-3, 3), st.booleans()),
                     min_size=1, max_size=max_rows)))


def to_inequalities(rows) -> list[Inequality]:
    return [Inequality.make(a, b, strict) for a, b, strict in rows]


@settings(max_examples=200, deadline=None)
@given(systems(3, 6))
def test_feasibility_matches_lp_oracle(case):
    n, rows = case
    assert feasible(to_inequalities(rows), n) == lp_vertex_feasible(rows, n)


@settings(max_examples=40, deadline=None)
@given(systems(5, 5))
def test_feasibility_matches_lp_oracle_five_variables(case):
    n, rows = case
    assert feasible(to_inequalities(rows), n) == lp_vertex_feasible(rows, n)


@settings(max_examples=200, deadline=None)
@given(systems(5, 7), st.integers(min_value=0, max_value=1000))
def test_sample_point_satisfies_system(case, seed):
    n, rows = case
    system = to_inequalities(rows)
    x = sample_point(system, n, random.Random(seed))
    assert (x is not None) == feasible(system, n)
    if x is not None:
        assert all(i.holds(x) for i in system)


def test_strict_versus_non_strict():
    # x > 0 and -x >= 0 is infeasible; x >= 0 and -x >= 0 has x = 0
    assert not feasible([Inequality.make([1], 0), Inequality.make([-1], 0, strict=False)], 1)
    both = [Inequality.make([1], 0, strict=False), Inequality.make([-1], 0, strict=False)]
    assert feasible(both, 1)
    assert sample_point(both, 1) == [Fraction(0)]


def test_open_interval():
    system = [Inequality.make([1], 0), Inequality.make([-1], 1)]  # 0 < x < 1
    x = sample_point(system, 1, random.Random(3))
    assert x is not None and 0 < x[0] < 1


def test_contradictory_constant():
    assert eliminate_all([Inequality.make([0, 0], -1)], 2) is None
    assert not feasible([Inequality.make([0], 0)], 1)


def test_normalized_collapses_multiples():
    assert Inequality.make([2, -4], 6).normalized() == Inequality.make([Fraction(1, 2), -1],
                                                                       Fraction(3, 2))
