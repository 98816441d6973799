"""
Exchange graph of an optimal decomposition.

Vertices are slots. Arc i -> j has weight min_k rho_k(i) - rho_k(j) over the
customers k that request i, do not request j, and may use both; the
minimizing customer (smallest index on ties) is kept per arc. Shortest paths
move one request from i to j while keeping the decomposition optimal, and
shortest-path distances from a source give supporting prices.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import (
    NegativeCycleError,
    bellman_ford,
    breadth_first_order,
    csgraph_from_dense,
    shortest_path,
)

from netbalance.core.errors import ContractError, InfeasibleTrafficError, InvariantViolation
from netbalance.models.decomposition import Decomposition
from netbalance.models.profiles import PriceSchedule

logger = logging.getLogger(__name__)

NO_CUSTOMER = -1
_NO_PREDECESSOR = -9999


class ExchangeGraph:
    """
    Dense (n x n) weights with +inf for missing arcs, patched in place after
    every exchange.
    """

    def __init__(self, decomposition: Decomposition):
        self.decomposition = decomposition
        n = decomposition.instance.n
        self.weights = np.full((n, n), np.inf)
        self.arg_customer = np.full((n, n), NO_CUSTOMER, dtype=np.int64)
        self._refresh(np.arange(n))
        logger.debug("Exchange graph built: %d slots, %d arcs", n, self.arc_count)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def arc_count(self) -> int:
        return int(np.isfinite(self.weights).sum())

    def arcs(self) -> dict[tuple[int, int], tuple[float, int]]:
        """Finite arcs as {(i, j): (weight, arg customer)}"""
        rows, cols = np.nonzero(np.isfinite(self.weights))
        return {(int(i), int(j)): (float(self.weights[i, j]), int(self.arg_customer[i, j]))
                for i, j in zip(rows, cols)}

    def _refresh(self, slots: np.ndarray) -> None:
        """Recompute every arc with both ends in `slots`"""
        instance = self.decomposition.instance
        profiles = self.decomposition.profiles
        in_set = np.zeros(self.n, dtype=bool)
        in_set[slots] = True
        block = np.ix_(slots, slots)
        self.weights[block] = np.inf
        self.arg_customer[block] = NO_CUSTOMER
        touching = np.flatnonzero((instance.allowed & in_set[None, :]).any(axis=1))
        for k in touching:
            allowed = instance.allowed[k] & in_set
            ones = np.flatnonzero(allowed & (profiles[k] == 1))
            zeros = np.flatnonzero(allowed & (profiles[k] == 0))
            if ones.size == 0 or zeros.size == 0:
                continue
            scores = instance.scores[k]
            candidate = scores[ones][:, None] - scores[zeros][None, :]
            cell = np.ix_(ones, zeros)
            better = candidate < self.weights[cell]
            self.weights[cell] = np.where(better, candidate, self.weights[cell])
            self.arg_customer[cell] = np.where(better, k, self.arg_customer[cell])

    def _csgraph(self, weights: np.ndarray | None = None):
        # explicit zero-weight arcs must survive the conversion
        return csgraph_from_dense(self.weights if weights is None else weights, null_value=np.inf)

    def reachable_from(self, i: int) -> np.ndarray:
        order = breadth_first_order(self._csgraph(), i, directed=True, return_predecessors=False)
        mask = np.zeros(self.n, dtype=bool)
        mask[order] = True
        return mask

    def reachability(self) -> np.ndarray:
        """reach[i, j] is True iff j is reachable from i (diagonal included)"""
        arcs = csr_matrix(np.isfinite(self.weights).astype(float))
        hops = shortest_path(arcs, method="D", directed=True, unweighted=True)
        return np.isfinite(hops)

    def shortest_path(self, i: int, j: int) -> tuple[list[int], float]:
        """
        Bellman-Ford shortest path i -> j.

        Raises:
            InfeasibleTrafficError: j not reachable from i
            InvariantViolation: negative cycle (input decomposition not optimal)
        """
        try:
            dist, pred = bellman_ford(self._csgraph(), directed=True, indices=i,
                                      return_predecessors=True)
        except NegativeCycleError as e:
            raise InvariantViolation(
                "negative cycle in the exchange graph: decomposition is not optimal") from e
        if not np.isfinite(dist[j]):
            raise InfeasibleTrafficError(f"slot {j} is not reachable from slot {i}")
        path = [j]
        while path[-1] != i:
            prev = int(pred[path[-1]])
            if prev == _NO_PREDECESSOR:
                raise InvariantViolation(f"broken predecessor chain from {i} to {j}")
            path.append(prev)
        path.reverse()
        return path, float(dist[j])

    def exchange(self, i: int, j: int) -> float:
        """
        Move one request from slot i to slot j along a shortest path.

        Returns:
            The path length, i.e. the change of psi_value
        """
        if i == j:
            return 0.0
        path, length = self.shortest_path(i, j)
        profiles = self.decomposition.profiles
        moves = [(int(self.arg_customer[a, b]), a, b) for a, b in zip(path, path[1:])]
        before = self.decomposition.psi_value
        for k, a, b in moves:
            if profiles[k, a] != 1 or profiles[k, b] != 0:
                raise InvariantViolation(f"arc {a}->{b} no longer valid for customer {k}")
            profiles[k, a] = 0
            profiles[k, b] = 1
        changed = sorted({k for k, _, _ in moves})
        slots = np.flatnonzero(self.decomposition.instance.allowed[changed].any(axis=0))
        self._refresh(slots)
        after = self.decomposition.psi_value
        if not np.isclose(after, before + length, rtol=1e-9, atol=1e-9):
            logger.warning("psi moved by %.12g along a path of length %.12g", after - before, length)
        logger.debug("Exchange %d -> %d via %s (length %.6g)", i, j, path, length)
        return length


def build(decomposition: Decomposition) -> ExchangeGraph:
    """Exchange graph of an optimal decomposition"""
    return ExchangeGraph(decomposition)


def neighbor_feasible(graph: ExchangeGraph, i: int, j: int) -> bool:
    """True iff N - e_i + e_j is achievable (j reachable from i)"""
    if i == j:
        return True
    return bool(graph.reachable_from(i)[j])


def exchange(decomposition: Decomposition, graph: ExchangeGraph, i: int, j: int) -> Decomposition:
    """Optimal decomposition of N - e_i + e_j; updates decomposition and graph in place"""
    if graph.decomposition is not decomposition:
        raise ContractError("graph was built for a different decomposition")
    graph.exchange(i, j)
    return decomposition


@dataclass(frozen=True)
class PriceRecovery:
    """Supporting prices: raw (y[source] = 0) and shifted to be nonnegative"""
    raw: PriceSchedule
    nonnegative: PriceSchedule
    source: int
    big_m: float


def big_m(weights: np.ndarray) -> float:
    """1 + n * largest finite |w|; 1 when the graph has no arc"""
    finite = weights[np.isfinite(weights)]
    if finite.size == 0:
        return 1.0
    return 1.0 + weights.shape[0] * float(np.abs(finite).max())


def recover_prices(decomposition: Decomposition, source: int = 0,
                   graph: ExchangeGraph | None = None) -> PriceRecovery:
    """
    Prices under which every stored profile is a best response.

    y is the shortest-path distance from `source` in the exchange graph
    completed with arcs source -> t of weight M for every missing arc.
    """
    n = decomposition.instance.n
    if not 0 <= source < n:
        raise ContractError(f"source slot {source} outside 0..{n - 1}")
    if decomposition.instance.K == 0:
        zeros = PriceSchedule.zeros(n)
        return PriceRecovery(raw=zeros, nonnegative=zeros, source=source, big_m=1.0)
    graph = graph if graph is not None else ExchangeGraph(decomposition)
    weights = graph.weights.copy()
    m = big_m(weights)
    row = weights[source]
    missing = ~np.isfinite(row)
    missing[source] = False
    row[missing] = m
    try:
        dist = bellman_ford(graph._csgraph(weights), directed=True, indices=source)
    except NegativeCycleError as e:
        raise InvariantViolation("negative cycle after big-M completion") from e
    dist = np.asarray(dist, dtype=float)
    dist[source] = 0.0
    raw = PriceSchedule(dist)
    logger.debug("Recovered prices from slot %d (M=%.6g)", source, m)
    return PriceRecovery(raw=raw, nonnegative=raw.nonnegative(), source=source, big_m=m)
