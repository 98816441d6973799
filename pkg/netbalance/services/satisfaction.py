"""
Satisfaction curves and the provider objective.

s(n) = 1 for n <= N1 and 1 - lam * exp(-2 NC / (n - N1)) above; realtime
classes use N1 = 0. Over capacity the curve is evaluated at NC and the
objective pays M_pen per unit of overflow.
"""

import logging
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from netbalance.core.errors import CapacityError, ContractError, CurveError
from netbalance.models.scenario import ApplicationKind, CellParams, Scenario
from netbalance.models.traffic import TrafficVector

logger = logging.getLogger(__name__)

# Absolute slack for rounding in the curve checks
_CURVE_TOLERANCE = 64 * np.finfo(float).eps


@dataclass(frozen=True)
class SatisfactionCurve:
    kind: ApplicationKind
    n1: int
    nc: int
    lam: float

    def __post_init__(self):
        object.__setattr__(self, "kind", ApplicationKind(self.kind))
        if self.kind == ApplicationKind.REALTIME and self.n1 != 0:
            raise ContractError("realtime curves have no soft threshold (n1 must be 0)")
        if not 0 <= self.n1 < self.nc:
            raise ContractError(f"curve needs 0 <= n1 < nc (got n1={self.n1}, nc={self.nc})")
        if not self.lam > 0:
            raise ContractError("lam must be > 0")

    @classmethod
    def for_cell(cls, cell: CellParams, kind: ApplicationKind, lam: float) -> "SatisfactionCurve":
        kind = ApplicationKind(kind)
        return cls(kind=kind, n1=cell.threshold(kind), nc=cell.nc, lam=lam)


def _raw_values(n, n1, nc, lam) -> np.ndarray:
    n, n1, nc, lam = np.broadcast_arrays(
        np.asarray(n, dtype=float), np.asarray(n1, dtype=float),
        np.asarray(nc, dtype=float), np.asarray(lam, dtype=float))
    x = np.minimum(n, nc)
    excess = x - n1
    above = excess > 0
    safe = np.where(above, excess, 1.0)
    curved = 1.0 - lam * np.exp(-2.0 * nc / safe)
    return np.where(above, curved, 1.0)


def satisfaction_values(n, n1, nc, lam) -> np.ndarray:
    """
    Vectorized satisfaction, counts clamped to capacity.

    Broadcasts n against the curve parameters. Results are clipped to [0, 1]
    to absorb rounding when s(NC) is exactly 0.
    """
    return np.clip(_raw_values(n, n1, nc, lam), 0.0, 1.0)


def satisfaction(curve: SatisfactionCurve, n: int) -> float:
    """Satisfaction of one class at n active users"""
    if n < 0:
        raise ContractError("active count must be >= 0")
    if n > curve.nc:
        raise CapacityError(f"{n} active users exceed capacity {curve.nc}")
    if n <= curve.n1:
        return 1.0
    return max(0.0, 1.0 - curve.lam * math.exp(-2.0 * curve.nc / (n - curve.n1)))


def verify_curve(curve: SatisfactionCurve) -> None:
    """
    Check s nonincreasing, n*s(n) discretely concave and s(NC) >= 0 on 0..NC.

    Raises:
        CurveError: when any check fails
    """
    grid = np.arange(curve.nc + 1)
    s = _raw_values(grid, curve.n1, curve.nc, curve.lam)
    if s[-1] < -_CURVE_TOLERANCE:
        raise CurveError(f"satisfaction at capacity is negative ({s[-1]:.4g}); lam={curve.lam} too large")
    if np.any(np.diff(s) > 0):
        raise CurveError("satisfaction is not nonincreasing")
    f = grid * s
    if grid.size >= 3:
        second = f[2:] + f[:-2] - 2.0 * f[1:-1]
        scale = max(1.0, float(curve.nc))
        if np.any(second > _CURVE_TOLERANCE * scale):
            n = int(np.argmax(second > _CURVE_TOLERANCE * scale)) + 1
            raise CurveError(f"n*s(n) is not concave at n={n} (kind={curve.kind.value}, "
                             f"n1={curve.n1}, nc={curve.nc}, lam={curve.lam})")


def scenario_curves(scenario: Scenario) -> dict[tuple[int, int, int], SatisfactionCurve]:
    """Every configured curve keyed by (cell, application, contract)"""
    curves = {}
    for l, cell in enumerate(scenario.cells):
        for a, app in enumerate(scenario.applications):
            for b, contract in enumerate(scenario.contracts):
                curves[(l, a, b)] = SatisfactionCurve.for_cell(cell, app.kind, contract.lam)
    return curves


def verify_scenario_curves(scenario: Scenario) -> None:
    """Run verify_curve on each distinct curve of the scenario"""
    seen = set()
    for (l, a, b), curve in scenario_curves(scenario).items():
        if curve in seen:
            continue
        seen.add(curve)
        try:
            verify_curve(curve)
        except CurveError as e:
            raise CurveError(f"cell {l}, application {a}, contract {b}: {e}", application=a,
                             field="cells") from e
    logger.debug("Verified %d distinct satisfaction curves", len(seen))


def cell_objective(curves: Mapping[tuple[int, int], SatisfactionCurve],
                   counts: Mapping[tuple[int, int], int],
                   total: int,
                   gammas: Sequence[float]) -> float:
    """
    sum over classes (a, b) of gamma_b * N^{a,b} * s^{a,b}(total) for one cell.

    Raises:
        ContractError: when total is not the sum of counts
    """
    if sum(counts.values()) != total:
        raise ContractError(f"class counts sum to {sum(counts.values())}, total is {total}")
    value = 0.0
    for (a, b), count in counts.items():
        if count:
            value += gammas[b] * count * satisfaction(curves[(a, b)], total)
    return value


def penalty_weight(scenario: Scenario) -> float:
    """M_pen = 1 + max gamma * total demand; dominates any achievable objective"""
    gamma_max = max(c.gamma for c in scenario.contracts)
    return 1.0 + gamma_max * scenario.total_demand()


class ProviderObjective:
    """
    Weighted satisfaction of all classes minus the capacity penalty.

    Works on full (A, B, n) traffic arrays; block_view fixes every block but
    one and exposes the remaining per-slot objective to the greedy.
    """

    def __init__(self, scenario: Scenario, penalty: float | None = None):
        self.A, self.B, self.n = scenario.A, scenario.B, scenario.n
        self.gammas = np.array([c.gamma for c in scenario.contracts], dtype=float)
        self.lams = np.array([c.lam for c in scenario.contracts], dtype=float)
        self.capacities = scenario.slot_capacities()
        self.thresholds = np.stack([scenario.slot_thresholds(a) for a in range(scenario.A)])
        self.penalty = penalty_weight(scenario) if penalty is None else float(penalty)

    def class_satisfaction(self, totals: np.ndarray) -> np.ndarray:
        """(A, B, n) satisfaction of each class at the given aggregate counts"""
        return satisfaction_values(
            totals[None, None, :],
            self.thresholds[:, None, :],
            self.capacities[None, None, :],
            self.lams[None, :, None],
        )

    def _slot_values(self, counts: np.ndarray) -> np.ndarray:
        totals = counts.sum(axis=(0, 1))
        s = self.class_satisfaction(totals)
        weighted = (self.gammas[None, :, None] * counts * s).sum(axis=(0, 1))
        return weighted - self.penalty * np.maximum(totals - self.capacities, 0)

    def slot_values(self, traffic: TrafficVector | np.ndarray) -> np.ndarray:
        counts = traffic.counts if isinstance(traffic, TrafficVector) else np.asarray(traffic)
        return self._slot_values(counts)

    def value(self, traffic: TrafficVector | np.ndarray) -> float:
        return float(self.slot_values(traffic).sum())

    def block_view(self, traffic: TrafficVector | np.ndarray, a: int, b: int) -> "BlockObjective":
        counts = traffic.counts if isinstance(traffic, TrafficVector) else np.asarray(traffic)
        return BlockObjective(self, counts, a, b)


class BlockObjective:
    """Per-slot provider objective of block (a, b) with the other blocks frozen"""
    name = "satisfaction"

    def __init__(self, provider: ProviderObjective, counts: np.ndarray, a: int, b: int):
        self.provider = provider
        self.a, self.b = a, b
        self._counts = np.array(counts, dtype=np.int64)

    def slot_values(self, x: np.ndarray) -> np.ndarray:
        counts = self._counts.copy()
        counts[self.a, self.b] = x
        return self.provider._slot_values(counts)


def penalized_objective(scenario: Scenario, traffic: TrafficVector | np.ndarray) -> float:
    """Provider objective of a full traffic vector, capacity penalty included"""
    return ProviderObjective(scenario).value(traffic)
