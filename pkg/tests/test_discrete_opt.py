"""Greedy over achievable traffic vectors and the membership oracle."""

import numpy as np
import pytest

from netbalance.core.config import settings
from netbalance.services.discrete_opt import (
    best_exchange,
    exchange_gains,
    greedy_maximize,
    hill_climb,
    initial_decomposition,
    minkowski_member,
)
from netbalance.services.objectives import NegatedSquares, SeparableObjective, objective_value
from tests.conftest import ZERO_PRICE_PROFILES
from tests.oracles import compositions, decomposition_table, random_instance


def _concave_objective(rng, n):
    """Random separable concave quadratic with a capacity penalty"""
    weight = rng.integers(1, 4, size=n).astype(float)
    center = rng.integers(0, 4, size=n).astype(float)
    capacity = rng.integers(1, 5, size=n)
    penalty = float(rng.integers(0, 20))

    def fn(x):
        return -weight * (x - center) ** 2 - penalty * np.maximum(x - capacity, 0)

    return SeparableObjective(fn, name="quadratic")


def test_initial_decomposition_from_scenario(example_scenario):
    """Zero-price responses of the example."""
    decomposition = initial_decomposition(example_scenario)
    np.testing.assert_array_equal(decomposition.profiles, ZERO_PRICE_PROFILES)


def test_exchange_gains_are_separable():
    """gain[i, j] = f(N - e_i + e_j) - f(N)."""
    objective = NegatedSquares()
    counts = np.array([3, 3, 1])
    gains = exchange_gains(objective, counts)
    base = objective_value(objective, counts)
    for i in range(3):
        for j in range(3):
            if i == j:
                assert gains[i, j] == -np.inf
                continue
            moved = counts.copy()
            moved[i] -= 1
            moved[j] += 1
            assert gains[i, j] == pytest.approx(objective_value(objective, moved) - base)


def test_exchange_gains_empty_rows():
    """Nothing can leave an empty slot."""
    gains = exchange_gains(NegatedSquares(), np.array([0, 2]))
    assert np.all(gains[0] == -np.inf)
    assert gains[1, 0] == pytest.approx(2.0)


def test_best_exchange_row_major_tie_break():
    """Equal gains: smallest i, then smallest j."""
    objective = NegatedSquares()
    feasible = np.ones((3, 3), dtype=bool)
    assert best_exchange(feasible, objective, np.array([3, 3, 1])) == (2.0, 0, 2)
    assert best_exchange(feasible, objective, np.array([3, 2, 2])) is None
    assert best_exchange(np.ones((1, 1), dtype=bool), objective, np.array([4])) is None


def test_greedy_on_example(zero_price_decomposition):
    """From (3, 3, 1) one move reaches the balanced optimum."""
    run = greedy_maximize(zero_price_decomposition, NegatedSquares())
    assert run.trace == [(3, 3, 1), (2, 3, 2)]
    assert run.moves == [(0, 2)]
    assert run.values == [-19.0, -17.0]
    assert run.value == -17.0
    assert not run.truncated
    np.testing.assert_array_equal(run.decomposition.counts, [2, 3, 2])
    np.testing.assert_array_equal(zero_price_decomposition.counts, [3, 3, 1])


def test_greedy_value_never_decreases(zero_price_decomposition):
    run = greedy_maximize(zero_price_decomposition, NegatedSquares())
    assert all(b > a for a, b in zip(run.values, run.values[1:]))


def test_iteration_bound_truncates(zero_price_decomposition):
    """Hitting the bound flags the run."""
    run = greedy_maximize(zero_price_decomposition, NegatedSquares(), max_iterations=0)
    assert run.truncated
    assert run.iterations == 0
    assert run.trace == [(3, 3, 1)]


def test_iteration_bound_from_settings(zero_price_decomposition, monkeypatch):
    monkeypatch.setattr(settings, "MAX_GREEDY_ITERATIONS", 0)
    assert greedy_maximize(zero_price_decomposition, NegatedSquares()).truncated


def test_hill_climb_calls_apply():
    """apply sees every accepted move in order."""
    seen = []
    run = hill_climb(np.array([4, 0, 0]), NegatedSquares(),
                     feasible=lambda counts: np.ones((3, 3), dtype=bool),
                     apply=lambda i, j: seen.append((i, j)))
    assert seen == run.moves
    assert run.trace[-1] in {(2, 1, 1), (1, 2, 1), (1, 1, 2)}
    assert run.value == -6.0


def test_greedy_matches_exhaustive_search(rng):
    """Local optimum of the greedy is the global optimum over achievable N."""
    for _ in range(200):
        instance = random_instance(rng)
        table = decomposition_table(instance)
        objective = _concave_objective(rng, instance.n)
        best = max(objective_value(objective, np.array(N)) for N in table)
        run = greedy_maximize(initial_decomposition(instance), objective)
        assert not run.truncated
        assert run.iterations <= 2 * instance.total_demand
        assert run.value == pytest.approx(best, abs=1e-9)
        final = tuple(run.counts.tolist())
        assert final in table
        np.testing.assert_array_equal(run.decomposition.counts, run.counts)
        assert run.decomposition.psi_value == pytest.approx(-table[final], abs=1e-9)


def test_minkowski_membership(rng):
    """Flow oracle agrees with enumeration and returns a valid witness."""
    for _ in range(60):
        instance = random_instance(rng, max_k=4, max_n=4)
        table = decomposition_table(instance)
        for N in compositions(instance.total_demand, instance.n):
            membership = minkowski_member(instance, N)
            assert bool(membership) == (N in table)
            if membership:
                np.testing.assert_array_equal(membership.witness.counts, N)


def test_minkowski_rejects_wrong_total(example_instance):
    assert not minkowski_member(example_instance, [3, 3, 0])
    assert not minkowski_member(example_instance, [3, 3, 1, 0])
    assert minkowski_member(example_instance, [3, 2, 2])
    assert not minkowski_member(example_instance, [0, 0, 7])


def test_greedy_keeps_capacity_once_reached(rng):
    """With a dominating penalty the climb never leaves the capacity-feasible region."""
    for _ in range(150):
        instance = random_instance(rng)
        table = decomposition_table(instance)
        capacities = rng.integers(0, 4, size=instance.n)
        objective = NegatedSquares.capacity_limited(capacities, instance.total_demand)
        run = greedy_maximize(initial_decomposition(instance), objective)
        fits = [bool(np.all(np.array(N) <= capacities)) for N in run.trace]
        if True in fits:
            assert all(fits[fits.index(True):])
        if any(np.all(np.array(N) <= capacities) for N in table):
            assert fits[-1]


def test_achievable_vectors_satisfy_exchange_axiom(rng):
    """N, N' achievable and N_i > N'_i: some j with N_j < N'_j swaps both ways."""
    for _ in range(30):
        instance = random_instance(rng, max_k=3, max_n=4, max_r=2)
        members = sorted(decomposition_table(instance))
        for _ in range(8):
            N = np.array(members[rng.integers(len(members))])
            other = np.array(members[rng.integers(len(members))])
            for i in np.flatnonzero(N > other):
                found = False
                for j in np.flatnonzero(N < other):
                    moved, back = N.copy(), other.copy()
                    moved[i] -= 1
                    moved[j] += 1
                    back[i] += 1
                    back[j] -= 1
                    if minkowski_member(instance, moved) and minkowski_member(instance, back):
                        found = True
                        break
                assert found, (N.tolist(), other.tolist(), int(i))
