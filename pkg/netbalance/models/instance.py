"""One (application, contract) block of a scenario, as normalized score matrices."""

from dataclasses import dataclass

import numpy as np

from netbalance.core.errors import ContractError, InfeasibleCustomerError
from netbalance.models.scenario import FORBIDDEN, FeasibleSetDescriptor, Scenario, feasible_set


@dataclass(frozen=True, eq=False)
class BlockInstance:
    """
    Customers of one block with their normalized scores.

    scores[k, i] is rho_k(t)/alpha_k on allowed slots and FORBIDDEN elsewhere;
    demands[k] is R_k. Arrays are read-only.
    """
    scores: np.ndarray
    demands: np.ndarray
    customer_ids: tuple[int, ...]
    application: int = 0
    contract: int = 0

    def __post_init__(self):
        scores = np.array(self.scores, dtype=float)
        demands = np.array(self.demands, dtype=np.int64).reshape(-1)
        if scores.ndim != 2:
            raise ContractError("scores must be a (K, n) matrix")
        if scores.shape[0] != demands.shape[0] or len(self.customer_ids) != demands.shape[0]:
            raise ContractError("scores, demands and customer ids disagree on K")
        if np.isnan(scores).any() or (scores == np.inf).any():
            raise ContractError("scores must be finite or FORBIDDEN")
        if (demands < 0).any():
            raise ContractError("demands must be nonnegative")
        allowed = np.isfinite(scores).sum(axis=1)
        short = np.flatnonzero(demands > allowed)
        if short.size:
            k = int(short[0])
            raise InfeasibleCustomerError(
                f"customer {self.customer_ids[k]} demands {demands[k]} requests "
                f"but has only {allowed[k]} allowed slots",
                customer=self.customer_ids[k], application=self.application)
        scores.setflags(write=False)
        demands.setflags(write=False)
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "demands", demands)
        object.__setattr__(self, "customer_ids", tuple(int(k) for k in self.customer_ids))

    @property
    def K(self) -> int:
        return self.scores.shape[0]

    @property
    def n(self) -> int:
        return self.scores.shape[1]

    @property
    def allowed(self) -> np.ndarray:
        return np.isfinite(self.scores)

    @property
    def total_demand(self) -> int:
        return int(self.demands.sum())

    def has_forbidden_slots(self) -> bool:
        return not bool(self.allowed.all())

    def descriptor(self, k: int) -> FeasibleSetDescriptor:
        forbidden = np.flatnonzero(~np.isfinite(self.scores[k]))
        return FeasibleSetDescriptor(frozenset(forbidden.tolist()), int(self.demands[k]), self.n)

    @classmethod
    def from_scores(cls, scores, demands, n: int | None = None, **kwargs) -> "BlockInstance":
        """Build directly from a score matrix (rows may use FORBIDDEN)"""
        scores = np.asarray(scores, dtype=float)
        if scores.size == 0:
            if n is None:
                raise ContractError("n is required for an empty instance")
            scores = scores.reshape(0, n)
        ids = tuple(range(scores.shape[0]))
        return cls(scores=scores, demands=demands, customer_ids=ids, **kwargs)

    @classmethod
    def from_scenario(cls, scenario: Scenario, a: int, b: int) -> "BlockInstance":
        """Slice (application a, contract b) out of a scenario"""
        ids = scenario.customers_of(b)
        scores = np.full((len(ids), scenario.n), FORBIDDEN)
        demands = np.zeros(len(ids), dtype=np.int64)
        for row, k in enumerate(ids):
            descriptor = feasible_set(k, a, scenario)
            usage = scenario.customers[k].usage[a]
            allowed = np.flatnonzero(descriptor.allowed_mask())
            times = allowed // scenario.L
            prefs = np.asarray(usage.preferences, dtype=float)
            scores[row, allowed] = prefs[times] / usage.sensitivity
            demands[row] = usage.demand
        return cls(scores=scores, demands=demands, customer_ids=tuple(ids), application=a, contract=b)
