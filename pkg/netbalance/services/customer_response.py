"""
Exact low-level oracle: a customer's optimal requests at given prices.

The customer maximizes <rho + y, u> over binary u with sum R that vanish on
forbidden slots, i.e. picks the R allowed slots with the largest rho + y.
Ties go to the smallest slot index.
"""

from dataclasses import dataclass
from math import comb

import numpy as np

from netbalance.core.errors import ContractError, InfeasibleCustomerError
from netbalance.models.decomposition import Decomposition
from netbalance.models.instance import BlockInstance
from netbalance.models.profiles import ConsumptionProfile, PriceSchedule
from netbalance.models.scenario import FeasibleSetDescriptor


def _as_prices(prices, n: int) -> np.ndarray:
    values = prices.values if isinstance(prices, PriceSchedule) else np.asarray(prices, dtype=float)
    if values.shape != (n,):
        raise ContractError(f"price vector has shape {values.shape}, expected ({n},)")
    return values


def _marginal_values(descriptor: FeasibleSetDescriptor, scores, prices) -> np.ndarray:
    scores = np.asarray(scores, dtype=float)
    if scores.shape != (descriptor.n,):
        raise ContractError(f"score vector has shape {scores.shape}, expected ({descriptor.n},)")
    if descriptor.demand > descriptor.allowed_count:
        raise InfeasibleCustomerError(
            f"demand {descriptor.demand} exceeds {descriptor.allowed_count} allowed slots")
    values = scores + _as_prices(prices, descriptor.n)
    return np.where(descriptor.allowed_mask(), values, -np.inf)


def _ranking(values: np.ndarray) -> np.ndarray:
    # descending value, ascending index among equals
    return np.argsort(-values, kind="stable")


def best_response(descriptor: FeasibleSetDescriptor, scores, prices) -> ConsumptionProfile:
    """Optimal profile with smallest-index tie-break"""
    values = _marginal_values(descriptor, scores, prices)
    bits = np.zeros(descriptor.n, dtype=np.int8)
    bits[_ranking(values)[:descriptor.demand]] = 1
    return ConsumptionProfile(bits)


def tropical_value(descriptor: FeasibleSetDescriptor, scores, prices) -> float:
    """max over feasible u of <rho + y, u>"""
    values = _marginal_values(descriptor, scores, prices)
    if descriptor.demand == 0:
        return 0.0
    top = values[_ranking(values)[:descriptor.demand]]
    return float(top.sum())


@dataclass(frozen=True)
class ArgmaxClass:
    """
    Compact description of all optimal profiles.

    Every optimal profile takes all of `strict` (slots scoring above the R-th
    value) and `needed` further slots out of `ties` (slots scoring exactly the
    R-th value).
    """
    strict: frozenset[int]
    ties: frozenset[int]
    needed: int
    threshold: float
    allowed: frozenset[int]

    def contains(self, profile: ConsumptionProfile | np.ndarray) -> bool:
        bits = profile.bits if isinstance(profile, ConsumptionProfile) else np.asarray(profile)
        chosen = set(np.flatnonzero(bits).tolist())
        if not chosen <= self.allowed:
            return False
        if not self.strict <= chosen:
            return False
        rest = chosen - self.strict
        return len(rest) == self.needed and rest <= self.ties

    @property
    def count(self) -> int:
        """Number of optimal profiles"""
        return comb(len(self.ties), self.needed)


def argmax_set(descriptor: FeasibleSetDescriptor, scores, prices) -> ArgmaxClass:
    values = _marginal_values(descriptor, scores, prices)
    allowed = frozenset(np.flatnonzero(descriptor.allowed_mask()).tolist())
    R = descriptor.demand
    if R == 0:
        return ArgmaxClass(frozenset(), frozenset(), 0, float("inf"), allowed)
    threshold = float(values[_ranking(values)[R - 1]])
    strict = frozenset(np.flatnonzero(values > threshold).tolist())
    ties = frozenset(np.flatnonzero(values == threshold).tolist())
    return ArgmaxClass(strict, ties, R - len(strict), threshold, allowed)


def violated_inequalities(decomposition: Decomposition, prices) -> list[tuple[int, int, int]]:
    """
    Triples (k, i, j) with u_k(i)=1, u_k(j)=0, j allowed and
    rho_k(i) + y_i < rho_k(j) + y_j. Empty iff every stored profile is a best
    response at y.
    """
    instance = decomposition.instance
    y = _as_prices(prices, instance.n)
    violations = []
    for k in range(instance.K):
        values = instance.scores[k] + y
        ones = np.flatnonzero(decomposition.profiles[k] == 1)
        zeros = np.flatnonzero((decomposition.profiles[k] == 0) & instance.allowed[k])
        if ones.size == 0 or zeros.size == 0:
            continue
        bad = values[ones][:, None] < values[zeros][None, :]
        for r, c in zip(*np.nonzero(bad)):
            violations.append((k, int(ones[r]), int(zeros[c])))
    return violations


def induces(decomposition: Decomposition, prices) -> bool:
    """True when each customer's stored profile lies in its argmax set at prices"""
    instance = decomposition.instance
    for k in range(instance.K):
        cls = argmax_set(instance.descriptor(k), instance.scores[k], prices)
        if not cls.contains(decomposition.profiles[k]):
            return False
    return True


def respond_all(instance: BlockInstance, prices) -> Decomposition:
    """Best response of every customer of a block"""
    profiles = np.zeros((instance.K, instance.n), dtype=np.int8)
    for k in range(instance.K):
        profiles[k] = best_response(instance.descriptor(k), instance.scores[k], prices).bits
    return Decomposition(instance, profiles)
