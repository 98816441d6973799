"""Exchange graph: arcs, exchanges along shortest paths, price recovery."""

import warnings

import numpy as np
import pytest

from netbalance.core.errors import ContractError, InfeasibleTrafficError, InvariantViolation
from netbalance.models.decomposition import Decomposition
from netbalance.models.instance import BlockInstance
from netbalance.services.customer_response import argmax_set, violated_inequalities
from netbalance.services.discrete_opt import initial_decomposition
from netbalance.services.exchange_graph import (
    ExchangeGraph,
    big_m,
    build,
    exchange,
    neighbor_feasible,
    recover_prices,
)
from tests.oracles import decomposition_table, random_instance


def test_example_arcs(zero_price_decomposition):
    """Arc weights and minimizing customers of the (3, 3, 1) decomposition."""
    graph = build(zero_price_decomposition)
    assert graph.arcs() == {
        (0, 1): (0.0, 0),
        (0, 2): (0.0, 0),
        (1, 0): (1.5, 4),
        (1, 2): (0.5, 3),
        (2, 1): (1.0, 1),
    }
    assert graph.arc_count == 5


def test_example_reachability(zero_price_decomposition):
    """Every slot reaches every other one, 2 -> 0 through slot 1."""
    graph = build(zero_price_decomposition)
    assert graph.reachability().all()
    assert neighbor_feasible(graph, 2, 0)
    path, length = graph.shortest_path(2, 0)
    assert path == [2, 1, 0]
    assert length == pytest.approx(2.5)


def test_example_exchange(zero_price_decomposition):
    """Moving a request from slot 0 to slot 1 flips customer 0."""
    graph = build(zero_price_decomposition)
    before = zero_price_decomposition.psi_value
    exchange(zero_price_decomposition, graph, 0, 1)
    np.testing.assert_array_equal(zero_price_decomposition.profiles[0], [0, 1, 0])
    np.testing.assert_array_equal(zero_price_decomposition.counts, [2, 4, 1])
    assert zero_price_decomposition.psi_value == pytest.approx(before)
    fresh = ExchangeGraph(zero_price_decomposition.copy())
    np.testing.assert_array_equal(graph.weights, fresh.weights)


def test_exchange_needs_matching_graph(zero_price_decomposition):
    """A graph only updates the decomposition it was built for."""
    graph = build(zero_price_decomposition.copy())
    with pytest.raises(ContractError):
        exchange(zero_price_decomposition, graph, 0, 1)


def test_reachability_with_negative_arcs():
    """Hop counts ignore arc weights, negative ones included."""
    instance = BlockInstance.from_scores([[1.0, 0.0]], [1])
    graph = build(Decomposition(instance, np.array([[0, 1]])))
    assert graph.arcs() == {(1, 0): (-1.0, 0)}
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        reach = graph.reachability()
    np.testing.assert_array_equal(reach, [[True, False], [True, True]])


def test_unreachable_slot():
    """A lone customer pinned to slot 0 cannot move."""
    instance = BlockInstance.from_scores([[0.0, float("-inf")], [float("-inf"), 0.0]], [1, 1])
    graph = build(initial_decomposition(instance))
    assert not neighbor_feasible(graph, 0, 1)
    with pytest.raises(InfeasibleTrafficError):
        graph.shortest_path(0, 1)


def test_negative_cycle_signals_non_optimal_input():
    """Two customers that would both gain from swapping."""
    instance = BlockInstance.from_scores([[1.0, 0.0], [0.0, 1.0]], [1, 1])
    decomposition = Decomposition(instance, np.array([[0, 1], [1, 0]]))
    graph = build(decomposition)
    with pytest.raises(InvariantViolation):
        graph.shortest_path(0, 1)


def test_exchange_matches_exhaustive_table(rng):
    """j reachable from i iff N - e_i + e_j is achievable; psi stays optimal."""
    checked = 0
    for _ in range(100):
        instance = random_instance(rng)
        table = decomposition_table(instance)
        start = initial_decomposition(instance)
        N = start.counts
        assert start.psi_value == pytest.approx(-table[tuple(N.tolist())])
        graph = build(start)
        reach = graph.reachability()
        for i in range(instance.n):
            if N[i] == 0:
                continue
            for j in range(instance.n):
                if i == j:
                    continue
                target = N.copy()
                target[i] -= 1
                target[j] += 1
                key = tuple(target.tolist())
                assert bool(reach[i, j]) == (key in table)
                if key not in table:
                    continue
                moved = start.copy()
                exchange(moved, build(moved), i, j)
                np.testing.assert_array_equal(moved.counts, target)
                assert moved.psi_value == pytest.approx(-table[key], abs=1e-9)
                checked += 1
    assert checked > 0


def test_reverse_exchange_restores_psi(rng):
    """i -> j followed by j -> i returns to the starting optimum."""
    for _ in range(50):
        instance = random_instance(rng)
        start = initial_decomposition(instance)
        graph = build(start.copy())
        pairs = [(i, j) for i, j in zip(*np.nonzero(graph.reachability())) if i != j]
        if not pairs:
            continue
        i, j = (int(x) for x in pairs[rng.integers(len(pairs))])
        working = start.copy()
        graph = build(working)
        graph.exchange(i, j)
        graph.exchange(j, i)
        np.testing.assert_array_equal(working.counts, start.counts)
        assert working.psi_value == pytest.approx(start.psi_value, abs=1e-9)


def test_example_prices(optimum_decomposition):
    """Prices of the (3, 2, 2) optimum from slot 0."""
    recovery = recover_prices(optimum_decomposition, source=0)
    np.testing.assert_allclose(recovery.raw.values, [0.0, -0.5, 0.0])
    np.testing.assert_allclose(recovery.nonnegative.values, [0.5, 0.0, 0.5])
    assert recovery.big_m == pytest.approx(1 + 3 * 1.5)
    assert violated_inequalities(optimum_decomposition, recovery.raw) == []


def test_zero_customers_zero_prices():
    """Empty block: every price is 0."""
    instance = BlockInstance.from_scores(np.empty((0, 4)), [], n=4)
    decomposition = Decomposition(instance, np.empty((0, 4)))
    recovery = recover_prices(decomposition, source=2)
    np.testing.assert_array_equal(recovery.raw.values, np.zeros(4))
    np.testing.assert_array_equal(recovery.nonnegative.values, np.zeros(4))


def test_big_m():
    """1 + n * max |w| over finite arcs."""
    assert big_m(np.full((3, 3), np.inf)) == 1.0
    weights = np.array([[np.inf, -2.0], [1.0, np.inf]])
    assert big_m(weights) == 5.0


def test_source_out_of_range(optimum_decomposition):
    with pytest.raises(ContractError):
        recover_prices(optimum_decomposition, source=3)


def _random_optimum(rng, instance):
    """Zero-price optimum moved along a few random exchanges"""
    working = initial_decomposition(instance)
    graph = build(working)
    for _ in range(int(rng.integers(0, 4))):
        pairs = [(i, j) for i, j in zip(*np.nonzero(graph.reachability())) if i != j]
        if not pairs:
            break
        i, j = pairs[rng.integers(len(pairs))]
        graph.exchange(int(i), int(j))
    return working


def test_recovered_prices_induce_decomposition(rng):
    """Stored profiles are best responses at the recovered prices, under any shift."""
    for _ in range(100):
        instance = random_instance(rng)
        decomposition = _random_optimum(rng, instance)
        source = int(rng.integers(instance.n))
        recovery = recover_prices(decomposition, source=source)
        assert recovery.raw.values[source] == 0.0
        assert recovery.nonnegative.values.min() == pytest.approx(0.0)
        assert violated_inequalities(decomposition, recovery.raw) == []
        assert violated_inequalities(decomposition, recovery.nonnegative) == []
        for k in range(instance.K):
            descriptor = instance.descriptor(k)
            reference = argmax_set(descriptor, instance.scores[k], recovery.raw)
            assert reference.contains(decomposition.profiles[k])
            for beta in (-5.0, 1.0, 7.0):
                shifted = argmax_set(descriptor, instance.scores[k], recovery.raw.shifted(beta))
                assert (shifted.strict, shifted.ties, shifted.needed) == \
                    (reference.strict, reference.ties, reference.needed)


def _polytope_holds(y):
    """Price system of the (3, 2, 2) optimum of the worked example"""
    y1, y2, y3 = y
    return y1 - y2 <= 1.5 and 0 <= y1 - y3 and -1 <= y2 - y3 <= -0.5


def test_example_price_polytope(optimum_decomposition):
    """Recovered prices and the hand-derived point both satisfy the price system."""
    recovery = recover_prices(optimum_decomposition, source=0)
    assert _polytope_holds(recovery.raw.values)
    assert _polytope_holds(recovery.nonnegative.values)
    hand = np.array([0.75, 0.0, 0.75])
    assert _polytope_holds(hand)
    assert violated_inequalities(optimum_decomposition, hand) == []
