from netbalance.models.decomposition import Decomposition
from netbalance.models.instance import BlockInstance
from netbalance.models.profiles import ConsumptionProfile, PriceSchedule
from netbalance.models.scenario import (
    FORBIDDEN,
    ApplicationKind,
    ApplicationParams,
    ApplicationUsage,
    CellParams,
    ContractParams,
    Customer,
    FeasibleSetDescriptor,
    Scenario,
    feasible_set,
    flatten,
    is_forbidden,
    unflatten,
    validate,
)
from netbalance.models.traffic import TrafficVector

__all__ = [
    "FORBIDDEN",
    "ApplicationKind",
    "ApplicationParams",
    "ApplicationUsage",
    "BlockInstance",
    "CellParams",
    "ConsumptionProfile",
    "ContractParams",
    "Customer",
    "Decomposition",
    "FeasibleSetDescriptor",
    "PriceSchedule",
    "Scenario",
    "TrafficVector",
    "feasible_set",
    "flatten",
    "is_forbidden",
    "unflatten",
    "validate",
]
