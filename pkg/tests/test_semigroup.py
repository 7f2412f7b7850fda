from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from krzyz.semigroup import (
    closure,
    density,
    generate,
    interval_example,
    interval_semigroup,
    is_exp_inductive,
    is_inductive,
)


def brute_force_sums(generators, bound):
    """All sums of at most `bound` generators that stay within 1..bound."""
    reached = set()
    frontier = {0}
    gens = [g for g in generators if g <= bound]
    for _ in range(bound):
        frontier = {x + g for x in frontier for g in gens if x + g <= bound} - reached
        if not frontier:
            break
        reached |= frontier
    return reached


def assert_semigroup_table(table):
    members = set(table.members)
    for g in table.generators:
        assert g in members
    for x in members:
        for y in members:
            if x + y <= table.bound:
                assert x + y in members
    for m in members:
        assert m in table.generators or any(m - x in members for x in members if x < m)


def test_generate_examples():
    t = generate({1, 2, 3}, 7, 7)
    assert t.members == [4, 5, 6] and 7 not in t
    t = generate(set(), 2)
    assert 1 in t and 2 in t
    assert 5 not in generate({1, 3}, 5)


def test_generate_rejects_out_of_range():
    with pytest.raises(ValueError):
        generate({5}, 5)
    with pytest.raises(ValueError):
        generate({0}, 5)
    with pytest.raises(ValueError):
        generate({1}, 5, bound=4)


def test_inductive_examples():
    assert is_inductive({1, 3}, 5)
    assert is_inductive({1, 2, 3}, 6)
    assert not is_inductive(set(), 2)
    with pytest.raises(ValueError):
        is_inductive({1, 7}, 5)


@pytest.mark.parametrize("n", [3, 5, 7, 9, 11, 21])
def test_odd_indices_are_inductive(n):
    assert is_inductive(set(range(1, n - 1, 2)), n)


@pytest.mark.parametrize("n", range(2, 30))
def test_lower_half_is_inductive(n):
    assert is_inductive({i for i in range(1, n) if i < (n + 1) / 2}, n)


def test_exp_inductive_examples():
    for n in range(2, 20):
        assert is_exp_inductive(set(range(1, n)), n)
    assert not is_exp_inductive(set(), 3)
    assert is_exp_inductive({1, 3}, 5)


def test_interval_examples():
    assert interval_semigroup(4, 5, 11).members == [4, 5, 8, 9, 10]
    assert interval_semigroup(2, 2, 20).members == list(range(2, 21, 2))
    assert interval_semigroup(2, 3, 10).members == list(range(2, 11))
    with pytest.raises(ValueError):
        interval_semigroup(1, 3, 10)
    with pytest.raises(ValueError):
        interval_semigroup(4, 3, 10)


def test_density_examples():
    n, I = interval_example(4, 5)
    assert n == 11 and I == {1, 2, 3, 6, 7}
    assert density(I, n) == Fraction(1, 2)
    assert density(range(1, 9), 9) == 1
    assert density(set(), 9) == 0


def test_brute_force_agreement(rng):
    # 10^4 random index sets with n up to 60
    for _ in range(10_000):
        n = int(rng.integers(2, 61))
        I = {int(i) for i in np.flatnonzero(rng.random(n - 1) < rng.random()) + 1}
        gens = [x for x in range(1, n + 1) if x not in I and x != n]
        expected = n not in brute_force_sums(gens, n)
        assert is_inductive(I, n) == expected
        if expected:
            assert density(I, n) >= Fraction(1, 2)


@given(st.integers(2, 40).flatmap(lambda n: st.tuples(st.just(n), st.sets(st.integers(1, n - 1)))))
def test_generated_tables_are_semigroups(case):
    n, K = case
    t = generate(K, n, bound=2 * n)
    assert_semigroup_table(t)
    assert set(t.members) == brute_force_sums(t.generators, 2 * n)


@given(st.sets(st.integers(1, 30)), st.integers(1, 40))
def test_closure_matches_brute_force(gens, bound):
    t = closure(gens, bound)
    assert set(t.members) == brute_force_sums(gens, bound)


def test_interval_agrees_with_generate():
    for b in range(2, 11):
        for a in range(2, b + 1):
            for bound in (b, 2 * b + 3, 50, 100):
                t = interval_semigroup(a, b, bound)
                assert t.members == closure(range(a, b + 1), bound).members
                assert_semigroup_table(t)
