"""
Greedy maximization of a separable concave objective over the achievable
traffic vectors of a block, and a flow-based membership oracle.

From the current point N the greedy evaluates every achievable neighbor
N - e_i + e_j, moves to the best one (first (i, j) in row-major order on
ties) and stops when no neighbor strictly improves.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from netbalance.core.config import settings
from netbalance.models.decomposition import Decomposition
from netbalance.models.instance import BlockInstance
from netbalance.models.scenario import Scenario
from netbalance.services.customer_response import respond_all
from netbalance.services.exchange_graph import ExchangeGraph
from netbalance.services.objectives import SlotObjective, objective_value

logger = logging.getLogger(__name__)


@dataclass
class GreedyRun:
    """Outcome of one greedy climb"""
    counts: np.ndarray
    decomposition: Decomposition | None = None
    trace: list[tuple[int, ...]] = field(default_factory=list)
    values: list[float] = field(default_factory=list)
    moves: list[tuple[int, int]] = field(default_factory=list)
    truncated: bool = False

    @property
    def iterations(self) -> int:
        return len(self.moves)

    @property
    def value(self) -> float:
        return self.values[-1]


def initial_decomposition(source: Scenario | BlockInstance, a: int = 0, b: int = 0) -> Decomposition:
    """Zero-price responses of every customer; optimal at its own counts"""
    instance = source if isinstance(source, BlockInstance) else BlockInstance.from_scenario(source, a, b)
    return respond_all(instance, np.zeros(instance.n))


def exchange_gains(objective: SlotObjective, counts: np.ndarray) -> np.ndarray:
    """
    gains[i, j] = f(N - e_i + e_j) - f(N) for i != j.

    Rows with N_i = 0 and the diagonal are -inf.
    """
    x = np.asarray(counts, dtype=np.int64)
    base = objective.slot_values(x)
    down = objective.slot_values(np.maximum(x - 1, 0)) - base
    up = objective.slot_values(x + 1) - base
    gains = down[:, None] + up[None, :]
    gains[x == 0, :] = -np.inf
    np.fill_diagonal(gains, -np.inf)
    return gains


def best_exchange(feasible: np.ndarray, objective: SlotObjective,
                  counts: np.ndarray) -> tuple[float, int, int] | None:
    """Best strictly improving feasible move (gain, i, j), or None"""
    n = len(counts)
    if n < 2:
        return None
    gains = np.where(feasible, exchange_gains(objective, counts), -np.inf)
    flat = int(np.argmax(gains))
    gain = float(gains.flat[flat])
    if not gain > 0:
        return None
    i, j = divmod(flat, n)
    return gain, i, j


def _iteration_limit(counts: np.ndarray, max_iterations: int | None) -> int:
    if max_iterations is not None:
        return max_iterations
    if settings.MAX_GREEDY_ITERATIONS is not None:
        return settings.MAX_GREEDY_ITERATIONS
    # every request can cross the grid at most a few times before the value stalls
    return max(1, int(np.sum(counts)) * max(1, len(counts)))


def hill_climb(counts: np.ndarray,
               objective: SlotObjective,
               feasible: Callable[[np.ndarray], np.ndarray],
               apply: Callable[[int, int], object] | None = None,
               max_iterations: int | None = None) -> GreedyRun:
    """
    Generic greedy loop.

    Args:
        counts: starting point
        objective: separable objective to maximize
        feasible: returns the (n x n) boolean mask of achievable moves at a point
        apply: called with (i, j) after each accepted move
        max_iterations: safety bound on the number of moves

    Returns:
        GreedyRun with the visited points and objective values
    """
    current = np.array(counts, dtype=np.int64)
    run = GreedyRun(counts=current, trace=[tuple(current.tolist())],
                    values=[objective_value(objective, current)])
    limit = _iteration_limit(current, max_iterations)
    while True:
        if run.iterations >= limit:
            logger.warning("Greedy stopped after %d moves without reaching a local optimum", limit)
            run.truncated = True
            break
        choice = best_exchange(feasible(current), objective, current)
        if choice is None:
            break
        gain, i, j = choice
        if apply is not None:
            apply(i, j)
        current[i] -= 1
        current[j] += 1
        run.moves.append((i, j))
        run.trace.append(tuple(current.tolist()))
        run.values.append(objective_value(objective, current))
        logger.debug("Move %d: %d -> %d (gain %.6g)", run.iterations, i, j, gain)
    return run


def greedy_maximize(decomposition: Decomposition, objective: SlotObjective,
                    max_iterations: int | None = None) -> GreedyRun:
    """
    Climb from an optimal decomposition, keeping it optimal through exchanges.

    The input is not modified; run.decomposition is optimal at run.counts.
    """
    working = decomposition.copy()
    graph = ExchangeGraph(working)
    run = hill_climb(working.counts, objective,
                     feasible=lambda _counts: graph.reachability(),
                     apply=graph.exchange,
                     max_iterations=max_iterations)
    run.decomposition = working
    logger.info("Greedy finished: %d moves, value %.6g", run.iterations, run.value)
    return run


@dataclass(frozen=True)
class Membership:
    member: bool
    witness: Decomposition | None = None

    def __bool__(self) -> bool:
        return self.member


def minkowski_member(instance: BlockInstance, counts) -> Membership:
    """
    Decide whether counts is a sum of one feasible profile per customer.

    Max-flow on source -> customer (capacity R_k) -> allowed slot (1) ->
    sink (capacity N_i); a saturating integral flow is the witness.
    """
    N = np.asarray(counts, dtype=np.int64).reshape(-1)
    total = instance.total_demand
    if N.shape != (instance.n,) or (N < 0).any() or int(N.sum()) != total:
        return Membership(False)
    if total == 0:
        return Membership(True, Decomposition(instance, np.zeros((instance.K, instance.n))))

    K, n = instance.K, instance.n
    sink = K + n + 1
    rows, cols, caps = [], [], []
    for k in range(K):
        if instance.demands[k] > 0:
            rows.append(0)
            cols.append(1 + k)
            caps.append(int(instance.demands[k]))
    ks, slots = np.nonzero(instance.allowed)
    rows.extend((1 + ks).tolist())
    cols.extend((1 + K + slots).tolist())
    caps.extend([1] * ks.size)
    for i in np.flatnonzero(N > 0):
        rows.append(1 + K + int(i))
        cols.append(sink)
        caps.append(int(N[i]))

    network = csr_matrix((np.array(caps, dtype=np.int32), (rows, cols)), shape=(sink + 1, sink + 1))
    result = maximum_flow(network, 0, sink, method="edmonds_karp")
    if result.flow_value != total:
        return Membership(False)
    flow = result.flow.toarray()[1:K + 1, K + 1:K + 1 + n]
    return Membership(True, Decomposition(instance, (flow > 0).astype(np.int8)))
