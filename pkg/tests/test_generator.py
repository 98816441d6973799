"""Seeded synthetic scenarios."""

import numpy as np
import pytest

from netbalance.core.errors import ScenarioValidationError
from netbalance.models.scenario import FORBIDDEN
from netbalance.models.traffic import TrafficVector
from netbalance.services.bilevel import require_disjointness
from netbalance.services.discrete_opt import initial_decomposition
from netbalance.services.generator import (
    CONTRACTS,
    DOWNLOAD,
    GeneratorParams,
    generate,
    peak_profile,
)
from netbalance.services.satisfaction import verify_scenario_curves
from netbalance.services.scenario_io import scenario_to_dict


@pytest.fixture(scope="module")
def small():
    return generate(seed=5, T=12, L=6, K=80)


def test_same_seed_same_scenario(small):
    assert scenario_to_dict(generate(seed=5, T=12, L=6, K=80)) == scenario_to_dict(small)


def test_different_seed_differs(small):
    assert scenario_to_dict(generate(seed=6, T=12, L=6, K=80)) != scenario_to_dict(small)


def test_shape(small):
    assert (small.T, small.L, small.K, small.A, small.B) == (12, 6, 80, 3, 2)
    assert small.contracts == CONTRACTS
    assert [app.price_sensitive for app in small.applications] == [True, False, False]


def test_windows_are_disjoint(small):
    require_disjointness(small)


def test_curves_are_valid(small):
    verify_scenario_curves(small)
    for cell in small.cells:
        assert cell.nc >= 2
        assert 0 <= cell.n1 < cell.nc


def test_download_usage_shape(small):
    """Preferred times score 1, adjacent hours 0, everything else forbidden."""
    for customer in small.customers:
        usage = customer.usage[DOWNLOAD]
        prefs = np.array(usage.preferences)
        preferred = np.flatnonzero(prefs == 1.0)
        assert usage.demand == preferred.size >= 1
        movable = np.flatnonzero(prefs == 0.0)
        for t in movable:
            assert np.min(np.abs(preferred - t)) == 1
        assert usage.effective_forbidden_times == frozenset(np.flatnonzero(prefs == FORBIDDEN).tolist())


def test_zero_price_load_fits_capacity(small):
    """Capacities are sized on the zero-price responses."""
    counts = np.zeros((small.A, small.B, small.n), dtype=np.int64)
    for a in range(small.A):
        for b in range(small.B):
            counts[a, b] = initial_decomposition(small, a, b).counts
    traffic = TrafficVector(counts)
    assert traffic.within_capacity(small.slot_capacities())


def test_premium_share_extremes():
    everyone = generate(seed=1, T=6, L=3, K=20, premium_share=1.0)
    assert all(c.contract == 1 for c in everyone.customers)
    nobody = generate(seed=1, T=6, L=3, K=20, premium_share=0.0)
    assert all(c.contract == 0 for c in nobody.customers)


def test_peak_profile():
    profile = peak_profile(24, [12, 20], 3.0)
    assert profile.sum() == pytest.approx(1.0)
    assert profile.argmax() in (11, 12, 19, 20)
    assert profile[3] < profile[12]


def test_params_validated():
    with pytest.raises(ScenarioValidationError):
        GeneratorParams(T=0)
    with pytest.raises(ScenarioValidationError):
        GeneratorParams(premium_share=1.5)


def test_fingerprint_is_stable():
    """Regenerating writes the same document."""
    first = scenario_to_dict(generate(seed=0, T=24, L=4, K=50))
    second = scenario_to_dict(generate(GeneratorParams(seed=0, T=24, L=4, K=50)))
    assert first == second
    assert len(first["customers"]) == 50
