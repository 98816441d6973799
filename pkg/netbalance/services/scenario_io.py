"""
Scenario and result files.

Both are YAML documents carrying a schema_version, validated with pydantic
models that reject unknown fields. FORBIDDEN scores are written as -.inf.
Writes go through a temporary file in the target directory and a rename, so
a failed run never leaves a partial file behind.
"""

import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Literal

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from netbalance.core.errors import ContractError, ScenarioValidationError
from netbalance.models.scenario import (
    ApplicationParams,
    ApplicationUsage,
    CellParams,
    ContractParams,
    Customer,
    Scenario,
)
from netbalance.services.satisfaction import ProviderObjective, verify_scenario_curves

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ApplicationDoc(_Strict):
    name: str
    kind: Literal["elastic", "realtime"] = "elastic"
    price_sensitive: bool = True


class ContractDoc(_Strict):
    name: str
    gamma: float
    lam: float


class CellDoc(_Strict):
    n1: int = Field(ge=0)
    nc: int = Field(gt=0)


class UsageDoc(_Strict):
    demand: int = Field(ge=0)
    preferences: list[float]
    forbidden_times: list[int] = []
    sensitivity: float = 1.0


class CustomerDoc(_Strict):
    contract: int = Field(ge=0)
    trajectory: list[int]
    usage: list[UsageDoc]


class ScenarioDoc(_Strict):
    schema_version: Literal[1]
    kind: Literal["scenario"] = "scenario"
    T: int = Field(ge=1)
    L: int = Field(ge=1)
    applications: list[ApplicationDoc]
    contracts: list[ContractDoc]
    cells: list[CellDoc]
    customers: list[CustomerDoc] = []


class GridDoc(_Strict):
    T: int
    L: int
    applications: list[ApplicationDoc]
    contracts: list[ContractDoc]
    cells: list[CellDoc]


class BlockDoc(_Strict):
    application: int
    contract: int
    optimized: bool
    counts: list[int]
    baseline_counts: list[int]
    psi_value: float
    price_source: int
    prices_raw: list[float]
    prices_nonnegative: list[float]
    trace: list[list[int]]
    customers: list[int]
    profiles: list[list[int]]


class SatisfactionDoc(_Strict):
    application: int
    contract: int
    baseline: list[float]
    optimized: list[float]


class ResultDoc(_Strict):
    schema_version: Literal[1]
    kind: Literal["result"] = "result"
    mode: str
    objective: str
    grid: GridDoc
    value: float
    baseline_value: float
    values: list[float]
    rounds: int
    within_capacity: bool
    baseline_traffic: list[list[list[int]]]
    traffic: list[list[list[int]]]
    blocks: list[BlockDoc]
    satisfaction: list[SatisfactionDoc]


def _plain(value: Any) -> Any:
    """numpy scalars/arrays to plain Python for the YAML dumper"""
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def _diagnostic(error: ValidationError) -> ScenarioValidationError:
    first = error.errors()[0]
    loc = [str(part) for part in first["loc"]]
    customer = int(loc[1]) if len(loc) > 1 and loc[0] == "customers" and loc[1].isdigit() else None
    application = None
    if customer is not None and len(loc) > 3 and loc[2] == "usage" and loc[3].isdigit():
        application = int(loc[3])
    field = ".".join(loc)
    return ScenarioValidationError(f"{field}: {first['msg']} ({error.error_count()} error(s))",
                                   customer=customer, application=application, field=field)


def _read_yaml(path: str | Path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = f" (line {mark.line + 1}, column {mark.column + 1})" if mark else ""
        raise ScenarioValidationError(f"{path}: not valid YAML{where}: {getattr(e, 'problem', e)}") from e
    if not isinstance(data, dict):
        raise ScenarioValidationError(f"{path}: expected a mapping at the top level")
    return data


def _write_yaml(path: str | Path, data: dict) -> None:
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    directory.mkdir(parents=True, exist_ok=True)
    text = yaml.safe_dump(_plain(data), sort_keys=False, default_flow_style=None, width=100)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.info("Wrote %s", path)


def scenario_from_doc(doc: ScenarioDoc) -> Scenario:
    customers = [
        Customer(
            contract=c.contract,
            trajectory=tuple(c.trajectory),
            usage=tuple(
                ApplicationUsage(demand=u.demand, preferences=tuple(u.preferences),
                                 forbidden_times=frozenset(u.forbidden_times),
                                 sensitivity=u.sensitivity)
                for u in c.usage),
        )
        for c in doc.customers
    ]
    return Scenario(
        T=doc.T,
        L=doc.L,
        applications=tuple(ApplicationParams(a.name, a.kind, a.price_sensitive) for a in doc.applications),
        contracts=tuple(ContractParams(c.name, c.gamma, c.lam) for c in doc.contracts),
        cells=tuple(CellParams(c.n1, c.nc) for c in doc.cells),
        customers=tuple(customers),
    )


def _grid_dict(scenario: Scenario) -> dict:
    return {
        "T": scenario.T,
        "L": scenario.L,
        "applications": [{"name": a.name, "kind": a.kind.value, "price_sensitive": a.price_sensitive}
                         for a in scenario.applications],
        "contracts": [{"name": c.name, "gamma": c.gamma, "lam": c.lam} for c in scenario.contracts],
        "cells": [{"n1": c.n1, "nc": c.nc} for c in scenario.cells],
    }


def scenario_to_dict(scenario: Scenario) -> dict:
    """Canonical document of a scenario"""
    data = {"schema_version": SCHEMA_VERSION, "kind": "scenario"}
    data.update(_grid_dict(scenario))
    data["customers"] = [
        {
            "contract": c.contract,
            "trajectory": list(c.trajectory),
            "usage": [
                {
                    "demand": u.demand,
                    "preferences": list(u.preferences),
                    "forbidden_times": sorted(u.forbidden_times),
                    "sensitivity": u.sensitivity,
                }
                for u in c.usage
            ],
        }
        for c in scenario.customers
    ]
    return data


def parse_scenario(data: dict, source: str = "<memory>") -> Scenario:
    """Validate a scenario document and build the Scenario"""
    try:
        doc = ScenarioDoc.model_validate(data)
    except ValidationError as e:
        raise _diagnostic(e) from e
    scenario = scenario_from_doc(doc)
    verify_scenario_curves(scenario)
    logger.info("Loaded scenario %s: T=%d L=%d A=%d B=%d K=%d",
                source, scenario.T, scenario.L, scenario.A, scenario.B, scenario.K)
    return scenario


def load(path: str | Path) -> Scenario:
    """Read and validate a scenario file"""
    return parse_scenario(_read_yaml(path), source=str(path))


def save_scenario(path: str | Path, scenario: Scenario) -> None:
    _write_yaml(path, scenario_to_dict(scenario))


def result_to_dict(scenario: Scenario, result, mode: str, objective: str) -> dict:
    """Canonical document of a GeneralResult (single-block results are wrapped first)"""
    provider = ProviderObjective(scenario)
    base_s = provider.class_satisfaction(result.baseline.aggregate())
    opt_s = provider.class_satisfaction(result.traffic.aggregate())
    blocks = []
    for (a, b), block in sorted(result.blocks.items()):
        blocks.append({
            "application": a,
            "contract": b,
            "optimized": block.optimized,
            "counts": block.counts,
            "baseline_counts": block.baseline_counts,
            "psi_value": block.decomposition.psi_value,
            "price_source": block.prices.source,
            "prices_raw": block.raw_prices,
            "prices_nonnegative": block.nonnegative_prices,
            "trace": [list(step) for step in block.trace],
            "customers": list(block.decomposition.instance.customer_ids),
            "profiles": block.decomposition.chosen_slots(),
        })
    satisfaction = [
        {"application": a, "contract": b, "baseline": base_s[a, b], "optimized": opt_s[a, b]}
        for a in range(scenario.A) for b in range(scenario.B)
    ]
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "result",
        "mode": mode,
        "objective": objective,
        "grid": _grid_dict(scenario),
        "value": result.value,
        "baseline_value": result.baseline_value,
        "values": result.values,
        "rounds": result.rounds,
        "within_capacity": result.within_capacity,
        "baseline_traffic": result.baseline.counts,
        "traffic": result.traffic.counts,
        "blocks": blocks,
        "satisfaction": satisfaction,
    }


def save_result(path: str | Path, scenario: Scenario, result, mode: str, objective: str) -> None:
    _write_yaml(path, result_to_dict(scenario, result, mode, objective))


def save(path: str | Path, obj, **context) -> None:
    """
    Save a Scenario, or a solve result given scenario=, mode= and objective=.
    """
    if isinstance(obj, Scenario):
        save_scenario(path, obj)
        return
    try:
        save_result(path, context["scenario"], obj, context["mode"], context["objective"])
    except KeyError as e:
        raise ContractError(f"saving a result needs the '{e.args[0]}' keyword") from e


def load_result(path: str | Path) -> ResultDoc:
    """Read and validate a result file"""
    data = _read_yaml(path)
    try:
        return ResultDoc.model_validate(data)
    except ValidationError as e:
        raise _diagnostic(e) from e
