"""Per-customer profiles realizing a traffic vector."""

from dataclasses import dataclass

import numpy as np

from netbalance.core.errors import ContractError
from netbalance.models.instance import BlockInstance
from netbalance.models.profiles import ConsumptionProfile


@dataclass(eq=False)
class Decomposition:
    """
    One binary profile per customer of a block.

    counts is the traffic vector N = sum_k u_k and psi_value is
    -sum_k <rho_k, u_k>. Solvers only hand out decompositions that are
    optimal for their own counts.
    """
    instance: BlockInstance
    profiles: np.ndarray

    def __post_init__(self):
        profiles = np.array(self.profiles, dtype=np.int8).reshape(self.instance.K, self.instance.n)
        if not np.isin(profiles, (0, 1)).all():
            raise ContractError("profiles must be binary")
        if (profiles[~self.instance.allowed] != 0).any():
            raise ContractError("profile uses a forbidden slot")
        sums = profiles.sum(axis=1)
        wrong = np.flatnonzero(sums != self.instance.demands)
        if wrong.size:
            k = int(wrong[0])
            raise ContractError(
                f"customer {self.instance.customer_ids[k]} profile sums to {sums[k]}, "
                f"demand is {self.instance.demands[k]}")
        self.profiles = profiles

    @property
    def counts(self) -> np.ndarray:
        return self.profiles.sum(axis=0, dtype=np.int64)

    def score_total(self) -> float:
        """sum_k <rho_k, u_k>"""
        if self.instance.K == 0:
            return 0.0
        return float(np.where(self.profiles == 1, self.instance.scores, 0.0).sum())

    @property
    def psi_value(self) -> float:
        return -self.score_total()

    def profile(self, k: int) -> ConsumptionProfile:
        return ConsumptionProfile(self.profiles[k])

    def chosen_slots(self) -> list[list[int]]:
        return [np.flatnonzero(row).tolist() for row in self.profiles]

    def copy(self) -> "Decomposition":
        return Decomposition(self.instance, self.profiles.copy())
