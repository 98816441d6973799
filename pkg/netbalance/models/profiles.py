"""Consumption profiles and per-slot price schedules."""

from dataclasses import dataclass

import numpy as np

from netbalance.core.errors import ContractError


@dataclass(frozen=True, eq=False)
class ConsumptionProfile:
    """Binary request vector of one customer over the flattened slots"""
    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.int8).reshape(-1)
        if not np.isin(bits, (0, 1)).all():
            raise ContractError("profile entries must be 0 or 1")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def demand(self) -> int:
        return int(self.bits.sum())

    @property
    def slots(self) -> list[int]:
        return np.flatnonzero(self.bits).tolist()

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConsumptionProfile):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash(self.bits.tobytes())


@dataclass(frozen=True, eq=False)
class PriceSchedule:
    """Discount per flattened slot for one (application, contract) block"""
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if not np.isfinite(values).all():
            raise ContractError("prices must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, n: int) -> "PriceSchedule":
        return cls(np.zeros(n))

    def shifted(self, beta: float) -> "PriceSchedule":
        return PriceSchedule(self.values + beta)

    def nonnegative(self) -> "PriceSchedule":
        """Smallest uniform shift making every price >= 0 with one price at 0"""
        if self.values.size == 0:
            return self
        return self.shifted(-float(self.values.min()))

    def __len__(self) -> int:
        return self.values.size
