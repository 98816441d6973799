"""Active-user counts per (application, contract, slot)."""

from dataclasses import dataclass

import numpy as np

from netbalance.core.errors import ContractError


@dataclass
class TrafficVector:
    counts: np.ndarray  # (A, B, n) integers

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.ndim != 3:
            raise ContractError("traffic counts must have shape (A, B, n)")
        if (self.counts < 0).any():
            raise ContractError("traffic counts must be nonnegative")

    @classmethod
    def zeros(cls, A: int, B: int, n: int) -> "TrafficVector":
        return cls(np.zeros((A, B, n), dtype=np.int64))

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.counts.shape

    def aggregate(self) -> np.ndarray:
        """N(t, l) summed over applications and contracts"""
        return self.counts.sum(axis=(0, 1))

    def block(self, a: int, b: int) -> np.ndarray:
        return self.counts[a, b].copy()

    def with_block(self, a: int, b: int, values) -> "TrafficVector":
        counts = self.counts.copy()
        counts[a, b] = values
        return TrafficVector(counts)

    def overflow(self, capacities: np.ndarray) -> np.ndarray:
        """Units above capacity per slot"""
        return np.maximum(self.aggregate() - capacities, 0)

    def within_capacity(self, capacities: np.ndarray) -> bool:
        return not bool(self.overflow(capacities).any())

    def copy(self) -> "TrafficVector":
        return TrafficVector(self.counts.copy())
