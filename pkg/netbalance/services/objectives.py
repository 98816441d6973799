"""
Separable provider objectives over one traffic block.

A slot objective maps a count vector x (length n) to per-slot values whose
sum is the objective; the greedy only ever needs those per-slot values.
"""

from typing import Callable, Protocol

import numpy as np


class SlotObjective(Protocol):
    """Separable objective f(x) = sum_i f_i(x_i)"""

    def slot_values(self, counts: np.ndarray) -> np.ndarray: ...


def objective_value(objective: SlotObjective, counts) -> float:
    return float(np.sum(objective.slot_values(np.asarray(counts, dtype=np.int64))))


class SeparableObjective:
    """Wraps a vectorized per-slot function"""

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], name: str = "separable"):
        self._fn = fn
        self.name = name

    def slot_values(self, counts: np.ndarray) -> np.ndarray:
        return np.asarray(self._fn(np.asarray(counts, dtype=np.int64)), dtype=float)


class NegatedSquares:
    """
    Balance measure -sum_i x_i^2, optionally with a capacity penalty
    penalty * sum_i max(x_i - capacity_i, 0).
    """
    name = "balance"

    def __init__(self, capacities: np.ndarray | None = None, penalty: float = 0.0):
        self.capacities = None if capacities is None else np.asarray(capacities, dtype=np.int64)
        self.penalty = float(penalty)

    def slot_values(self, counts: np.ndarray) -> np.ndarray:
        x = np.asarray(counts, dtype=float)
        values = -(x ** 2)
        if self.capacities is not None and self.penalty:
            values = values - self.penalty * np.maximum(x - self.capacities, 0.0)
        return values

    @classmethod
    def capacity_limited(cls, capacities: np.ndarray, total_demand: int) -> "NegatedSquares":
        """
        Penalty 1 + total_demand^2, above the whole range of -sum x_i^2 over
        vectors summing to total_demand, so no squared-load gain pays for
        an overflowing unit.
        """
        return cls(capacities=capacities, penalty=1.0 + float(total_demand) ** 2)
