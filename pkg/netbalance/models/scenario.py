"""
Scenario data model: grid, applications, contracts, cells and customers.

Slots flatten the (time, cell) grid as i = t * L + l. Every index in this
package is 0-based.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np

from netbalance.core.errors import (
    IndexRangeError,
    InfeasibleCustomerError,
    ScenarioValidationError,
)

logger = logging.getLogger(__name__)

# Score of a slot the customer can never use
FORBIDDEN = float("-inf")


def is_forbidden(score: float) -> bool:
    """True for the -inf sentinel"""
    return math.isinf(score) and score < 0


class ApplicationKind(str, Enum):
    """Satisfaction shape of an application class"""
    ELASTIC = "elastic"      # web, mail, download
    REALTIME = "realtime"    # streaming


@dataclass(frozen=True)
class ApplicationParams:
    """An application class; fixed (non price sensitive) traffic is background load"""
    name: str
    kind: ApplicationKind = ApplicationKind.ELASTIC
    price_sensitive: bool = True

    def __post_init__(self):
        object.__setattr__(self, "kind", ApplicationKind(self.kind))


@dataclass(frozen=True)
class ContractParams:
    """Contract class with objective weight gamma and curve steepness lam"""
    name: str
    gamma: float
    lam: float

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise ScenarioValidationError(f"contract '{self.name}': gamma must be > 0", field="gamma")
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise ScenarioValidationError(f"contract '{self.name}': lam must be > 0", field="lam")


@dataclass(frozen=True)
class CellParams:
    """Soft threshold n1 (elastic classes) and hard capacity nc of a cell"""
    n1: int
    nc: int

    def __post_init__(self):
        if not 0 <= self.n1 < self.nc:
            raise ScenarioValidationError(
                f"cell thresholds must satisfy 0 <= n1 < nc (got n1={self.n1}, nc={self.nc})",
                field="cells")

    def threshold(self, kind: ApplicationKind) -> int:
        """Soft threshold seen by an application kind (0 for realtime)"""
        return 0 if kind == ApplicationKind.REALTIME else self.n1


@dataclass(frozen=True)
class ApplicationUsage:
    """
    One customer's use of one application.

    demand: requests per day (R)
    preferences: score per time slot, FORBIDDEN for unusable times
    forbidden_times: times excluded explicitly (I)
    sensitivity: price sensitivity (alpha), divides the scores
    """
    demand: int
    preferences: tuple[float, ...]
    forbidden_times: frozenset[int] = frozenset()
    sensitivity: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "preferences", tuple(float(p) for p in self.preferences))
        object.__setattr__(self, "forbidden_times", frozenset(int(t) for t in self.forbidden_times))
        if self.demand < 0:
            raise ScenarioValidationError("demand must be >= 0", field="demand")
        if not (math.isfinite(self.sensitivity) and self.sensitivity > 0):
            raise ScenarioValidationError("sensitivity must be > 0", field="sensitivity")
        for p in self.preferences:
            if math.isnan(p) or p == math.inf:
                raise ScenarioValidationError("preferences must be finite or -inf", field="preferences")

    @property
    def effective_forbidden_times(self) -> frozenset[int]:
        """Explicit forbidden times plus times scored -inf"""
        scored_out = {t for t, p in enumerate(self.preferences) if is_forbidden(p)}
        return self.forbidden_times | scored_out

    @classmethod
    def idle(cls, T: int) -> "ApplicationUsage":
        """Usage of an application the customer never uses"""
        return cls(demand=0, preferences=(FORBIDDEN,) * T, forbidden_times=frozenset(range(T)))


@dataclass(frozen=True)
class Customer:
    """A customer: contract class, deterministic trajectory, one usage per application"""
    contract: int
    trajectory: tuple[int, ...]
    usage: tuple[ApplicationUsage, ...]

    def __post_init__(self):
        object.__setattr__(self, "trajectory", tuple(int(l) for l in self.trajectory))
        object.__setattr__(self, "usage", tuple(self.usage))

    def allowed_times(self, a: int) -> frozenset[int]:
        """Times at which application a may be used"""
        T = len(self.trajectory)
        return frozenset(range(T)) - self.usage[a].effective_forbidden_times


@dataclass(frozen=True)
class FeasibleSetDescriptor:
    """
    Binary profiles summing to `demand` that vanish on `forbidden_slots`.
    """
    forbidden_slots: frozenset[int]
    demand: int
    n: int

    def __post_init__(self):
        object.__setattr__(self, "forbidden_slots", frozenset(self.forbidden_slots))
        if self.demand > self.allowed_count:
            raise InfeasibleCustomerError(
                f"demand {self.demand} exceeds {self.allowed_count} allowed slots")

    @property
    def allowed_count(self) -> int:
        return self.n - len(self.forbidden_slots)

    def allowed_mask(self) -> np.ndarray:
        mask = np.ones(self.n, dtype=bool)
        if self.forbidden_slots:
            mask[sorted(self.forbidden_slots)] = False
        return mask


@dataclass(frozen=True)
class Scenario:
    """Full instance. Immutable after construction."""
    T: int
    L: int
    applications: tuple[ApplicationParams, ...]
    contracts: tuple[ContractParams, ...]
    cells: tuple[CellParams, ...]
    customers: tuple[Customer, ...] = ()

    def __post_init__(self):
        for name in ("applications", "contracts", "cells", "customers"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        validate(self)

    @property
    def A(self) -> int:
        return len(self.applications)

    @property
    def B(self) -> int:
        return len(self.contracts)

    @property
    def K(self) -> int:
        return len(self.customers)

    @property
    def n(self) -> int:
        return self.T * self.L

    def customers_of(self, b: int) -> list[int]:
        """Indices of the customers holding contract b, ascending"""
        return [k for k, c in enumerate(self.customers) if c.contract == b]

    def total_demand(self) -> int:
        return sum(u.demand for c in self.customers for u in c.usage)

    def slot_cells(self) -> np.ndarray:
        """Cell index of every flattened slot"""
        return np.tile(np.arange(self.L), self.T)

    def slot_capacities(self) -> np.ndarray:
        nc = np.array([c.nc for c in self.cells], dtype=np.int64)
        return nc[self.slot_cells()]

    def slot_thresholds(self, a: int) -> np.ndarray:
        kind = self.applications[a].kind
        n1 = np.array([c.threshold(kind) for c in self.cells], dtype=np.int64)
        return n1[self.slot_cells()]


def flatten(t: int, l: int, T: int, L: int) -> int:
    """Slot index of (t, l)"""
    if not (0 <= t < T and 0 <= l < L):
        raise IndexRangeError(f"(t={t}, l={l}) outside a {T}x{L} grid")
    return t * L + l


def unflatten(i: int, T: int, L: int) -> tuple[int, int]:
    """Inverse of flatten"""
    if not 0 <= i < T * L:
        raise IndexRangeError(f"slot {i} outside a {T}x{L} grid")
    return divmod(i, L)


def feasible_set(k: int, a: int, scenario: Scenario) -> FeasibleSetDescriptor:
    """Feasible-set descriptor of customer k for application a"""
    if not 0 <= k < scenario.K:
        raise IndexRangeError(f"customer {k} out of range")
    if not 0 <= a < scenario.A:
        raise IndexRangeError(f"application {a} out of range")
    customer = scenario.customers[k]
    usage = customer.usage[a]
    allowed = {
        flatten(t, customer.trajectory[t], scenario.T, scenario.L)
        for t in customer.allowed_times(a)
    }
    if usage.demand > len(allowed):
        raise InfeasibleCustomerError(
            f"customer {k} demands {usage.demand} requests of application {a} "
            f"but has only {len(allowed)} allowed slots",
            customer=k, application=a)
    return FeasibleSetDescriptor(
        forbidden_slots=frozenset(range(scenario.n)) - allowed,
        demand=usage.demand,
        n=scenario.n,
    )


def _check_indices(values: Iterable[int], upper: int) -> bool:
    return all(0 <= v < upper for v in values)


def validate(scenario: Scenario) -> None:
    """
    Check every data-model invariant.

    Raises:
        ScenarioValidationError (or InfeasibleCustomerError) naming the
        offending customer/application.
    """
    T, L = scenario.T, scenario.L
    if T < 1 or L < 1:
        raise ScenarioValidationError(f"grid must have T >= 1 and L >= 1 (got T={T}, L={L})")
    if scenario.A < 1:
        raise ScenarioValidationError("at least one application class is required", field="applications")
    if scenario.B < 1:
        raise ScenarioValidationError("at least one contract class is required", field="contracts")
    if len(scenario.cells) != L:
        raise ScenarioValidationError(
            f"expected {L} cells, got {len(scenario.cells)}", field="cells")

    for k, customer in enumerate(scenario.customers):
        if not 0 <= customer.contract < scenario.B:
            raise ScenarioValidationError(
                f"contract index {customer.contract} out of range", customer=k, field="contract")
        if len(customer.trajectory) != T:
            raise ScenarioValidationError(
                f"trajectory has {len(customer.trajectory)} entries, expected {T}",
                customer=k, field="trajectory")
        if not _check_indices(customer.trajectory, L):
            raise ScenarioValidationError("trajectory cell out of range", customer=k, field="trajectory")
        if len(customer.usage) != scenario.A:
            raise ScenarioValidationError(
                f"usage lists {len(customer.usage)} applications, expected {scenario.A}",
                customer=k, field="usage")
        for a, usage in enumerate(customer.usage):
            if len(usage.preferences) != T:
                raise ScenarioValidationError(
                    f"preferences have {len(usage.preferences)} entries, expected {T}",
                    customer=k, application=a, field="preferences")
            if not _check_indices(usage.forbidden_times, T):
                raise ScenarioValidationError(
                    "forbidden time out of range", customer=k, application=a, field="forbidden_times")
            allowed = T - len(usage.effective_forbidden_times)
            if usage.demand > allowed:
                raise InfeasibleCustomerError(
                    f"customer {k} demands {usage.demand} requests of application {a} "
                    f"but has only {allowed} allowed slots",
                    customer=k, application=a, field="demand")
    logger.debug("Scenario validated: T=%d L=%d A=%d B=%d K=%d", T, L, scenario.A, scenario.B, scenario.K)
