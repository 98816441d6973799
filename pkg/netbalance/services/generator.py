"""
Seeded synthetic scenarios shaped like a day of traffic in a city.

Customers commute between a home cell and a work cell. Three applications:
downloads react to prices and may move one hour either way, streaming and
web traffic are fixed. Cell capacities are sized from the zero-price load so
the busiest hour of each cell runs close to capacity.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from netbalance.core.config import settings
from netbalance.core.errors import ScenarioValidationError
from netbalance.models.scenario import (
    FORBIDDEN,
    ApplicationKind,
    ApplicationParams,
    ApplicationUsage,
    CellParams,
    ContractParams,
    Customer,
    Scenario,
)

logger = logging.getLogger(__name__)

STANDARD, PREMIUM = 0, 1
DOWNLOAD, STREAMING, WEB = 0, 1, 2

APPLICATIONS = (
    ApplicationParams("download", ApplicationKind.ELASTIC, price_sensitive=True),
    ApplicationParams("streaming", ApplicationKind.REALTIME, price_sensitive=False),
    ApplicationParams("web", ApplicationKind.ELASTIC, price_sensitive=False),
)

# lam = e^2 makes premium realtime satisfaction reach 0 exactly at capacity
CONTRACTS = (
    ContractParams("standard", gamma=1.0, lam=2.0 / 3.0 * math.exp(2.0)),
    ContractParams("premium", gamma=2.0, lam=math.exp(2.0)),
)

SENSITIVITY = {STANDARD: 0.5, PREMIUM: 1.0}


@dataclass
class GeneratorParams:
    seed: int = 0
    T: int = 24
    L: int = 43
    K: int = 2500
    premium_share: float = field(default_factory=lambda: settings.PREMIUM_SHARE)
    peak_hours: list[int] = field(default_factory=lambda: list(settings.PEAK_HOURS))
    capacity_load: float = field(default_factory=lambda: settings.CAPACITY_LOAD)
    threshold_share: float = field(default_factory=lambda: settings.THRESHOLD_SHARE)
    peak_boost: float = 3.0
    business_share: float = 0.7
    max_downloads: int = 3
    streaming_share: float = 0.5
    web_share: float = 0.6

    def __post_init__(self):
        if self.T < 1 or self.L < 1 or self.K < 0:
            raise ScenarioValidationError("T and L must be >= 1 and K >= 0", field="grid")
        if not 0.0 <= self.premium_share <= 1.0:
            raise ScenarioValidationError("premium_share must lie in [0, 1]", field="premium_share")


def peak_profile(T: int, peak_hours, boost: float) -> np.ndarray:
    """Relative request intensity per time slot, highest around the peak hours"""
    hours = (np.arange(T) + 0.5) * 24.0 / T
    weights = np.ones(T)
    for peak in peak_hours:
        gap = np.abs(hours - peak)
        gap = np.minimum(gap, 24.0 - gap)
        weights += boost * np.exp(-0.5 * gap ** 2)
    return weights / weights.sum()


def _trajectory(rng: np.random.Generator, T: int, home: int, work: int) -> tuple[int, ...]:
    leave = rng.uniform(7.0, 9.0)
    back = rng.uniform(17.0, 19.0)
    hours = (np.arange(T) + 0.5) * 24.0 / T
    return tuple(int(work) if leave <= h < back else int(home) for h in hours)


def _pick_times(rng: np.random.Generator, profile: np.ndarray, available: np.ndarray, count: int) -> np.ndarray:
    candidates = np.flatnonzero(available)
    count = min(count, candidates.size)
    if count == 0:
        return np.array([], dtype=np.int64)
    weights = profile[candidates] / profile[candidates].sum()
    return np.sort(rng.choice(candidates, size=count, replace=False, p=weights))


def _usage(T: int, preferred: np.ndarray, movable: np.ndarray, sensitivity: float) -> ApplicationUsage:
    if preferred.size == 0:
        return ApplicationUsage.idle(T)
    prefs = np.full(T, FORBIDDEN)
    prefs[movable] = 0.0
    prefs[preferred] = 1.0
    forbidden = frozenset(np.flatnonzero(~np.isfinite(prefs)).tolist())
    return ApplicationUsage(demand=int(preferred.size), preferences=tuple(prefs.tolist()),
                            forbidden_times=forbidden, sensitivity=sensitivity)


def _neighbors(T: int, times: np.ndarray) -> np.ndarray:
    mask = np.zeros(T, dtype=bool)
    for t in times:
        for s in (t - 1, t + 1):
            if 0 <= s < T:
                mask[s] = True
    mask[times] = False
    return np.flatnonzero(mask)


def generate(params: GeneratorParams | None = None, **overrides) -> Scenario:
    """
    Build a deterministic scenario for a seed.

    Zero-price responses are exactly the preferred times (score 1 beats the
    neighbouring hours scored 0), which is what the capacities are sized on.
    """
    params = params or GeneratorParams(**overrides)
    rng = np.random.default_rng(params.seed)
    T, L = params.T, params.L
    profile = peak_profile(T, params.peak_hours, params.peak_boost)
    business = max(1, L // 4)

    customers = []
    load = np.zeros((T, L), dtype=np.int64)
    for _ in range(params.K):
        contract = PREMIUM if rng.random() < params.premium_share else STANDARD
        alpha = SENSITIVITY[contract]
        home = int(rng.integers(L))
        work = int(rng.integers(business)) if rng.random() < params.business_share else int(rng.integers(L))
        trajectory = _trajectory(rng, T, home, work)

        free = np.ones(T, dtype=bool)
        downloads = _pick_times(rng, profile, free, int(rng.integers(1, params.max_downloads + 1)))
        shifts = _neighbors(T, downloads)
        free[downloads] = False
        free[shifts] = False
        usage = [_usage(T, downloads, shifts, alpha)]

        for share in (params.streaming_share, params.web_share):
            if rng.random() < share:
                times = _pick_times(rng, profile, free, int(rng.integers(1, 3)))
                free[times] = False
            else:
                times = np.array([], dtype=np.int64)
            usage.append(_usage(T, times, np.array([], dtype=np.int64), alpha))

        for app_usage in usage:
            for t, p in enumerate(app_usage.preferences):
                if p == 1.0:
                    load[t, trajectory[t]] += 1
        customers.append(Customer(contract=contract, trajectory=trajectory, usage=tuple(usage)))

    cells = []
    for l in range(L):
        peak = int(load[:, l].max())
        nc = max(2, math.ceil(peak / params.capacity_load))
        n1 = min(int(math.floor(params.threshold_share * nc)), nc - 1)
        cells.append(CellParams(n1=n1, nc=nc))

    scenario = Scenario(T=T, L=L, applications=APPLICATIONS, contracts=CONTRACTS,
                        cells=tuple(cells), customers=tuple(customers))
    logger.info("Generated scenario seed=%d T=%d L=%d K=%d (%d premium)", params.seed, T, L, params.K,
                sum(c.contract == PREMIUM for c in customers))
    return scenario
