"""
End-to-end solves.

solve_single handles one (application, contract) block: greedy on the
provider objective, decomposition kept optimal by exchanges, then price
recovery. solve_general runs block descent across all blocks of a scenario
and recovers prices per block.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from netbalance.core.config import settings
from netbalance.core.errors import DisjointnessError
from netbalance.models.decomposition import Decomposition
from netbalance.models.instance import BlockInstance
from netbalance.models.scenario import Customer, Scenario
from netbalance.models.traffic import TrafficVector
from netbalance.services.discrete_opt import (
    GreedyRun,
    best_exchange,
    greedy_maximize,
    initial_decomposition,
)
from netbalance.services.exchange_graph import ExchangeGraph, PriceRecovery, recover_prices
from netbalance.services.majorization import mincostflow_decompose, solve_major
from netbalance.services.objectives import SlotObjective, objective_value
from netbalance.services.satisfaction import ProviderObjective

logger = logging.getLogger(__name__)


@dataclass
class SolveResult:
    """Solution of one block"""
    application: int
    contract: int
    counts: np.ndarray
    decomposition: Decomposition
    prices: PriceRecovery
    value: float
    trace: list[tuple[int, ...]] = field(default_factory=list)
    values: list[float] = field(default_factory=list)
    baseline_counts: np.ndarray | None = None
    optimized: bool = True

    @property
    def iterations(self) -> int:
        return max(0, len(self.trace) - 1)

    @property
    def raw_prices(self) -> np.ndarray:
        return self.prices.raw.values

    @property
    def nonnegative_prices(self) -> np.ndarray:
        return self.prices.nonnegative.values


def _capacity_report(objective: SlotObjective, counts: np.ndarray) -> bool:
    capacities = getattr(objective, "capacities", None)
    if capacities is None:
        provider = getattr(objective, "provider", None)
        capacities = None if provider is None else provider.capacities
    if capacities is None:
        return True
    return bool(np.all(np.asarray(counts) <= capacities))


def solve_single(instance: BlockInstance, objective: SlotObjective, source: int | None = None,
                 start=None, max_iterations: int | None = None) -> SolveResult:
    """
    Solve one block.

    The climb starts from the zero-price responses, so among equally good
    optima it may stop at a different vector than the majorization path;
    pass start=bound.nmax (or use solve_single_major) to follow that trace.

    Args:
        instance: the block
        objective: separable objective of the block
        source: slot pinned to price 0 (settings.PRICE_SOURCE_SLOT by default)
        start: optional starting counts (optimal decomposition computed by flow)
        max_iterations: greedy safety bound
    """
    source = settings.PRICE_SOURCE_SLOT if source is None else source
    baseline = initial_decomposition(instance)
    first = baseline if start is None else mincostflow_decompose(instance, start)
    run = greedy_maximize(first, objective, max_iterations=max_iterations)
    prices = recover_prices(run.decomposition, source=source)
    if not _capacity_report(objective, run.counts):
        logger.warning("Block (%d, %d): no capacity-feasible point, best penalized value %.6g",
                       instance.application, instance.contract, run.value)
    return SolveResult(
        application=instance.application,
        contract=instance.contract,
        counts=run.counts.copy(),
        decomposition=run.decomposition,
        prices=prices,
        value=run.value,
        trace=run.trace,
        values=run.values,
        baseline_counts=baseline.counts,
    )


def solve_single_major(instance: BlockInstance, objective: SlotObjective, source: int | None = None,
                       start=None, max_iterations: int | None = None) -> SolveResult:
    """solve_single through the majorization fast path"""
    source = settings.PRICE_SOURCE_SLOT if source is None else source
    major = solve_major(instance, objective, source=source, start=start, max_iterations=max_iterations)
    return SolveResult(
        application=instance.application,
        contract=instance.contract,
        counts=major.counts.copy(),
        decomposition=major.decomposition,
        prices=major.prices,
        value=major.run.value,
        trace=major.run.trace,
        values=major.run.values,
        baseline_counts=initial_decomposition(instance).counts,
    )


def check_disjointness(customer: Customer) -> bool:
    """True iff the customer's allowed time sets are pairwise disjoint across applications"""
    return find_overlap(customer) is None


def find_overlap(customer: Customer) -> tuple[int, int] | None:
    allowed = [customer.allowed_times(a) for a in range(len(customer.usage))]
    for a in range(len(allowed)):
        for b in range(a + 1, len(allowed)):
            if allowed[a] & allowed[b]:
                return a, b
    return None


def require_disjointness(scenario: Scenario) -> None:
    """Raises DisjointnessError naming the first offending customer"""
    for k, customer in enumerate(scenario.customers):
        pair = find_overlap(customer)
        if pair is not None:
            raise DisjointnessError(
                f"customer {k}: applications {pair[0]} and {pair[1]} share allowed times",
                customer=k, applications=pair)


@dataclass
class GeneralResult:
    """Block-descent solution of a whole scenario"""
    blocks: dict[tuple[int, int], SolveResult]
    baseline: TrafficVector
    traffic: TrafficVector
    baseline_value: float
    value: float
    values: list[float] = field(default_factory=list)
    rounds: int = 0
    within_capacity: bool = True


@dataclass
class _BlockState:
    instance: BlockInstance
    decomposition: Decomposition
    graph: ExchangeGraph
    active: bool


def _block_moves(states: dict, provider: ProviderObjective,
                 traffic: TrafficVector) -> dict[tuple[int, int], tuple[float, int, int]]:
    moves = {}
    for (a, b), state in states.items():
        if not state.active:
            continue
        view = provider.block_view(traffic, a, b)
        choice = best_exchange(state.graph.reachability(), view, traffic.counts[a, b])
        if choice is not None:
            moves[(a, b)] = choice
    return moves


def _moved(traffic: TrafficVector, moves) -> TrafficVector:
    counts = traffic.counts.copy()
    for (a, b), (_, i, j) in moves.items():
        counts[a, b, i] -= 1
        counts[a, b, j] += 1
    return TrafficVector(counts)


def solve_general(scenario: Scenario, objective: ProviderObjective | None = None,
                  source: int | None = None, max_rounds: int | None = None) -> GeneralResult:
    """
    Block descent over every (application, contract) block.

    Each round every optimizable block proposes its best single exchange with
    the others frozen. All proposals are applied together when that improves
    the aggregate objective, otherwise only the best one. Stops when no block
    improves. Blocks of applications that do not react to prices stay at
    their zero-price response.
    The objective defaults to the penalized satisfaction of the scenario.

    Raises:
        DisjointnessError: a customer's application windows overlap
    """
    require_disjointness(scenario)
    source = settings.PRICE_SOURCE_SLOT if source is None else source
    max_rounds = settings.MAX_BLOCK_ROUNDS if max_rounds is None else max_rounds
    provider = ProviderObjective(scenario) if objective is None else objective

    states: dict[tuple[int, int], _BlockState] = {}
    baseline = TrafficVector.zeros(scenario.A, scenario.B, scenario.n)
    for a, app in enumerate(scenario.applications):
        for b in range(scenario.B):
            instance = BlockInstance.from_scenario(scenario, a, b)
            decomposition = initial_decomposition(instance)
            baseline.counts[a, b] = decomposition.counts
            states[(a, b)] = _BlockState(instance, decomposition, ExchangeGraph(decomposition),
                                         active=app.price_sensitive and instance.K > 0)
    traffic = baseline.copy()
    value = provider.value(traffic)
    values = [value]
    traces = {key: [tuple(traffic.counts[key].tolist())] for key in states}
    logger.info("Block descent: %d blocks (%d optimized), baseline value %.6g",
                len(states), sum(s.active for s in states.values()), value)

    rounds = 0
    while max_rounds is None or rounds < max_rounds:
        moves = _block_moves(states, provider, traffic)
        if not moves:
            break
        candidate = _moved(traffic, moves)
        candidate_value = provider.value(candidate)
        if not candidate_value > value:
            key = max(moves, key=lambda k: (moves[k][0], -k[0], -k[1]))
            moves = {key: moves[key]}
            candidate = _moved(traffic, moves)
            candidate_value = provider.value(candidate)
            if not candidate_value > value:
                logger.warning("Best single block move does not improve the aggregate; stopping")
                break
        for key, (_, i, j) in moves.items():
            states[key].graph.exchange(i, j)
            traces[key].append(tuple(candidate.counts[key].tolist()))
        traffic, value = candidate, candidate_value
        values.append(value)
        rounds += 1
        logger.debug("Round %d: %d block moves, value %.6g", rounds, len(moves), value)

    blocks = {}
    for (a, b), state in states.items():
        counts = traffic.counts[a, b].copy()
        decomposition = mincostflow_decompose(state.instance, counts)
        if not np.isclose(decomposition.psi_value, state.decomposition.psi_value, rtol=1e-9, atol=1e-9):
            logger.warning("Block (%d, %d): flow decomposition psi %.12g differs from maintained %.12g",
                           a, b, decomposition.psi_value, state.decomposition.psi_value)
        prices = recover_prices(decomposition, source=source)
        blocks[(a, b)] = SolveResult(
            application=a,
            contract=b,
            counts=counts,
            decomposition=decomposition,
            prices=prices,
            value=value,
            trace=traces[(a, b)],
            baseline_counts=baseline.counts[a, b].copy(),
            optimized=state.active,
        )
    within = traffic.within_capacity(provider.capacities)
    logger.info("Block descent finished after %d rounds: value %.6g (baseline %.6g)",
                rounds, value, values[0])
    return GeneralResult(blocks=blocks, baseline=baseline, traffic=traffic,
                         baseline_value=values[0], value=value, values=values,
                         rounds=rounds, within_capacity=within)


def block_optimality_gaps(scenario: Scenario, result: GeneralResult) -> dict[tuple[int, int], float]:
    """
    Best single-exchange gain left in each optimized block (0.0 when none
    improves). All zeros means the result is a per-block optimum.
    """
    provider = ProviderObjective(scenario)
    gaps = {}
    for key, block in result.blocks.items():
        if not block.optimized:
            continue
        a, b = key
        graph = ExchangeGraph(block.decomposition.copy())
        view = provider.block_view(result.traffic, a, b)
        choice = best_exchange(graph.reachability(), view, result.traffic.counts[a, b])
        gaps[key] = 0.0 if choice is None else choice[0]
    return gaps


def rerun_block(scenario: Scenario, result: GeneralResult, a: int, b: int) -> GreedyRun:
    """Full greedy re-run of one block with the others frozen at the result"""
    provider = ProviderObjective(scenario)
    view = provider.block_view(result.traffic, a, b)
    return greedy_maximize(result.blocks[(a, b)].decomposition, view)


def as_general(result: SolveResult, objective: SlotObjective,
               capacities: np.ndarray | None = None) -> GeneralResult:
    """View a single-block solve as a one-block GeneralResult"""
    baseline = result.baseline_counts if result.baseline_counts is not None else result.counts
    within = True if capacities is None else bool(np.all(result.counts <= capacities))
    return GeneralResult(
        blocks={(result.application, result.contract): result},
        baseline=TrafficVector(np.asarray(baseline)[None, None, :]),
        traffic=TrafficVector(result.counts[None, None, :]),
        baseline_value=objective_value(objective, baseline),
        value=result.value,
        values=list(result.values),
        rounds=result.iterations,
        within_capacity=within,
    )
