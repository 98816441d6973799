"""
Fast path for blocks without forbidden slots.

With no forbidden slot the achievable traffic vectors are exactly the N
majorized by the conjugate of the demand sequence, so neighbor feasibility
reduces to prefix-sum comparisons. The optimal decomposition of the final
point is then a min-cost transportation problem, solved by successive
shortest paths with node potentials.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from netbalance.core.errors import ContractError, DispatchError, InfeasibleTrafficError
from netbalance.models.decomposition import Decomposition
from netbalance.models.instance import BlockInstance
from netbalance.services.discrete_opt import GreedyRun, hill_climb
from netbalance.services.exchange_graph import PriceRecovery, recover_prices
from netbalance.services.objectives import SlotObjective

logger = logging.getLogger(__name__)

_NO_PREDECESSOR = -9999


@dataclass(frozen=True, eq=False)
class MajorizationBound:
    nmax: np.ndarray     # nonincreasing
    prefix: np.ndarray   # prefix[k-1] = sum of the k largest entries

    @property
    def total(self) -> int:
        return int(self.nmax.sum())


def conjugate_bound(demands, n: int) -> MajorizationBound:
    """Nmax_i = #{k : R_k > i}, the conjugate of the demand sequence"""
    R = np.asarray(demands, dtype=np.int64).reshape(-1)
    if (R < 0).any() or (R > n).any():
        raise ContractError(f"demands must lie in 0..{n}")
    nmax = (R[None, :] > np.arange(n)[:, None]).sum(axis=1).astype(np.int64)
    return MajorizationBound(nmax=nmax, prefix=np.cumsum(nmax))


def _sorted_prefix(counts: np.ndarray) -> np.ndarray:
    return np.cumsum(np.sort(counts)[::-1])


def is_majorized(counts, bound: MajorizationBound) -> bool:
    N = np.asarray(counts, dtype=np.int64).reshape(-1)
    if N.shape != bound.nmax.shape or (N < 0).any() or int(N.sum()) != bound.total:
        return False
    return bool(np.all(_sorted_prefix(N) <= bound.prefix))


class _RankTable:
    """
    Ranks of a point: first[i] is the smallest 1-based rank holding value N_i,
    last[i] the largest; tight[k] counts prefixes 1..k with S(N, k) = S(Nmax, k).
    """

    def __init__(self, N: np.ndarray, bound: MajorizationBound):
        values = np.sort(N)[::-1]
        # values is nonincreasing; search on its negation
        neg = -values
        self.first = np.searchsorted(neg, -N, side="left") + 1
        self.last = np.searchsorted(neg, -N, side="right")
        tight = (np.cumsum(values) == bound.prefix).astype(np.int64)
        self.tight = np.concatenate(([0], np.cumsum(tight)))

    def no_tight_between(self, lo, hi):
        """No tight prefix k with lo <= k <= hi (empty range when hi < lo)"""
        hi = np.maximum(hi, lo - 1)
        return (self.tight[hi] - self.tight[lo - 1]) == 0


def neighbor_feasible_major(counts, bound: MajorizationBound, i: int, j: int) -> bool:
    """
    Whether N - e_i + e_j stays majorized by Nmax, for N majorized by Nmax.

    Moving a unit from the last rank holding N_i to the first rank holding
    N_j raises the prefix sums S(N, k) for first(j) <= k < last(i) by one.
    """
    N = np.asarray(counts, dtype=np.int64)
    if i == j:
        return True
    if N[i] <= 0:
        return False
    if N[i] > N[j]:
        return True
    table = _RankTable(N, bound)
    return bool(table.no_tight_between(table.first[j], table.last[i] - 1))


def feasible_neighbors_major(counts, bound: MajorizationBound) -> np.ndarray:
    """(n x n) mask of (i, j) with N - e_i + e_j majorized by Nmax; diagonal False"""
    N = np.asarray(counts, dtype=np.int64)
    table = _RankTable(N, bound)
    lo = table.first[None, :]
    hi = table.last[:, None] - 1
    mask = (N[:, None] > N[None, :]) | table.no_tight_between(lo, hi)
    mask &= (N > 0)[:, None]
    np.fill_diagonal(mask, False)
    return mask


class TransportationSolver:
    """
    Max-score assignment of demands to slot counts.

    Network: source -> customer k (capacity R_k, cost 0) -> allowed slot i
    (capacity 1, cost -rho_k(i)) -> sink (capacity N_i, cost 0). Augments one
    Dijkstra shortest path at a time on reduced costs.
    """

    def __init__(self, instance: BlockInstance, counts):
        self.instance = instance
        self.counts = slot_counts(counts, instance.n)
        if int(self.counts.sum()) != instance.total_demand:
            raise InfeasibleTrafficError(
                f"counts sum to {int(self.counts.sum())}, demands sum to {instance.total_demand}")
        K, n = instance.K, instance.n
        self.source, self.sink = 0, K + n + 1
        self.nodes = K + n + 2

        tails, heads, caps, costs = [], [], [], []

        def add(u, v, cap, cost):
            tails.extend((u, v))
            heads.extend((v, u))
            caps.extend((cap, 0))
            costs.extend((cost, -cost))

        for k in range(K):
            add(self.source, 1 + k, int(instance.demands[k]), 0.0)
        self._assign_start = len(tails)
        ks, slots = np.nonzero(instance.allowed)
        for k, i in zip(ks, slots):
            add(1 + int(k), 1 + K + int(i), 1, -float(instance.scores[k, i]))
        self._assign_end = len(tails)
        for i in range(n):
            add(1 + K + i, self.sink, int(self.counts[i]), 0.0)

        self.tail = np.array(tails, dtype=np.int64)
        self.head = np.array(heads, dtype=np.int64)
        self.capacity = np.array(caps, dtype=np.int64)
        self.cost = np.array(costs, dtype=float)
        self.flow = np.zeros_like(self.capacity)
        self.potentials = self._initial_potentials()

    def _initial_potentials(self) -> np.ndarray:
        # shortest distances in the initial (acyclic) residual network
        K, n = self.instance.K, self.instance.n
        pi = np.zeros(self.nodes)
        neg = np.where(self.instance.allowed, -self.instance.scores, np.inf)
        slot_pi = neg.min(axis=0) if K else np.full(n, np.inf)
        slot_pi = np.where(np.isfinite(slot_pi), slot_pi, 0.0)
        pi[1 + K:1 + K + n] = slot_pi
        open_slots = self.counts > 0
        pi[self.sink] = slot_pi[open_slots].min() if open_slots.any() else 0.0
        return pi

    def _reduced_costs(self) -> np.ndarray:
        return self.cost + self.potentials[self.tail] - self.potentials[self.head]

    def _residual_graph(self):
        residual = self.capacity - self.flow > 0
        arcs = np.flatnonzero(residual)
        reduced = np.maximum(self._reduced_costs()[arcs], 0.0)
        graph = csr_matrix((reduced, (self.tail[arcs], self.head[arcs])),
                           shape=(self.nodes, self.nodes))
        return graph, arcs

    def solve(self) -> Decomposition:
        demand = self.instance.total_demand
        sent = 0
        while sent < demand:
            graph, arcs = self._residual_graph()
            dist, pred = dijkstra(graph, directed=True, indices=self.source, return_predecessors=True)
            if not np.isfinite(dist[self.sink]):
                raise InfeasibleTrafficError("counts are not achievable by the customers")
            lookup = {(int(self.tail[e]), int(self.head[e])): int(e) for e in arcs}
            path = []
            node = self.sink
            while node != self.source:
                prev = int(pred[node])
                if prev == _NO_PREDECESSOR:
                    raise InfeasibleTrafficError("broken augmenting path")
                path.append(lookup[(prev, node)])
                node = prev
            bottleneck = int(min(self.capacity[e] - self.flow[e] for e in path))
            bottleneck = min(bottleneck, demand - sent)
            for e in path:
                self.flow[e] += bottleneck
                self.flow[e ^ 1] -= bottleneck
            sent += bottleneck
            self.potentials += np.minimum(dist, dist[self.sink])
        return self._decomposition()

    def _decomposition(self) -> Decomposition:
        K, n = self.instance.K, self.instance.n
        profiles = np.zeros((K, n), dtype=np.int8)
        for e in range(self._assign_start, self._assign_end, 2):
            if self.flow[e] > 0:
                profiles[self.tail[e] - 1, self.head[e] - 1 - K] = 1
        return Decomposition(self.instance, profiles)

    def min_residual_reduced_cost(self) -> float:
        """Smallest reduced cost over residual arcs; >= 0 (up to rounding) certifies optimality"""
        residual = self.capacity - self.flow > 0
        if not residual.any():
            return 0.0
        return float(self._reduced_costs()[residual].min())


def slot_counts(counts, n: int) -> np.ndarray:
    """counts as a flat int vector of length n"""
    vector = np.asarray(counts, dtype=np.int64).reshape(-1)
    if vector.shape != (n,) or (vector < 0).any():
        raise ContractError(f"counts must be a nonnegative vector over the {n} slots")
    return vector


def mincostflow_decompose(instance: BlockInstance, counts) -> Decomposition:
    """Decomposition of counts maximizing sum_k <rho_k, u_k>"""
    return TransportationSolver(instance, counts).solve()


@dataclass
class MajorRun:
    run: GreedyRun
    decomposition: Decomposition
    prices: PriceRecovery

    @property
    def counts(self) -> np.ndarray:
        return self.run.counts


def solve_major(instance: BlockInstance, objective: SlotObjective, source: int = 0,
                start=None, max_iterations: int | None = None) -> MajorRun:
    """
    Greedy on counts screened by majorization, starting from Nmax unless a
    start is given, then min-cost-flow decomposition and price recovery.

    Raises:
        DispatchError: some customer has a forbidden slot
        ContractError: start is not a nonnegative vector over the slots
        InfeasibleTrafficError: start is not achievable
    """
    for k in range(instance.K):
        if not instance.allowed[k].all():
            raise DispatchError(
                f"customer {instance.customer_ids[k]} has forbidden slots; use the generic solver")
    bound = conjugate_bound(instance.demands, instance.n)
    if start is None:
        # the conjugate vector is itself achievable
        start = bound.nmax
    else:
        start = slot_counts(start, instance.n)
    if not is_majorized(start, bound):
        raise InfeasibleTrafficError("starting counts are not achievable")
    run = hill_climb(start, objective,
                     feasible=lambda counts: feasible_neighbors_major(counts, bound),
                     max_iterations=max_iterations)
    decomposition = mincostflow_decompose(instance, run.counts)
    run.decomposition = decomposition
    prices = recover_prices(decomposition, source=source)
    logger.info("Majorization path finished: %d moves, value %.6g", run.iterations, run.value)
    return MajorRun(run=run, decomposition=decomposition, prices=prices)
