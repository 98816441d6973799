"""Scenario and result files."""

import numpy as np
import pytest
import yaml

from netbalance.core.errors import ContractError, InfeasibleCustomerError, ScenarioValidationError
from netbalance.models.instance import BlockInstance
from netbalance.services import scenario_io
from netbalance.services.bilevel import as_general, solve_single_major
from netbalance.services.objectives import NegatedSquares


def _example_doc(example_path):
    with open(example_path, encoding="utf-8") as f:
        return yaml.safe_load(f)


def test_load_example(example_path, example_scenario):
    assert scenario_io.load(example_path) == example_scenario


def test_save_then_load(tmp_path, example_scenario):
    path = tmp_path / "nested" / "scenario.yaml"
    scenario_io.save(path, example_scenario)
    assert scenario_io.load(path) == example_scenario
    assert [p.name for p in path.parent.iterdir()] == ["scenario.yaml"]


def test_forbidden_scores_written_as_inf(tmp_path, example_path):
    data = _example_doc(example_path)
    data["customers"][0]["usage"][0]["preferences"][2] = float("-inf")
    scenario = scenario_io.parse_scenario(data)
    path = tmp_path / "s.yaml"
    scenario_io.save_scenario(path, scenario)
    assert "-.inf" in path.read_text()
    assert scenario_io.load(path).customers[0].usage[0].effective_forbidden_times == {2}


def test_unknown_field_rejected(example_path):
    data = _example_doc(example_path)
    data["customers"][2]["usage"][0]["colour"] = "red"
    with pytest.raises(ScenarioValidationError) as info:
        scenario_io.parse_scenario(data)
    assert info.value.customer == 2
    assert info.value.application == 0


def test_negative_demand_names_customer(example_path):
    data = _example_doc(example_path)
    data["customers"][1]["usage"][0]["demand"] = -1
    with pytest.raises(ScenarioValidationError) as info:
        scenario_io.parse_scenario(data)
    assert info.value.customer == 1
    assert "demand" in info.value.field


def test_infeasible_customer(example_path):
    data = _example_doc(example_path)
    data["customers"][3]["usage"][0]["forbidden_times"] = [0, 1]
    with pytest.raises(InfeasibleCustomerError) as info:
        scenario_io.parse_scenario(data)
    assert info.value.customer == 3


def test_schema_version_required(example_path):
    data = _example_doc(example_path)
    data["schema_version"] = 2
    with pytest.raises(ScenarioValidationError):
        scenario_io.parse_scenario(data)


def test_bad_yaml_reports_position(tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("schema_version: 1\nT: [3\n")
    with pytest.raises(ScenarioValidationError, match="line"):
        scenario_io.load(path)


def test_top_level_must_be_mapping(tmp_path):
    path = tmp_path / "list.yaml"
    path.write_text("- 1\n- 2\n")
    with pytest.raises(ScenarioValidationError):
        scenario_io.load(path)


def _example_result(scenario):
    instance = BlockInstance.from_scenario(scenario, 0, 0)
    objective = NegatedSquares()
    return as_general(solve_single_major(instance, objective), objective, scenario.slot_capacities())


def test_result_file(tmp_path, example_scenario):
    path = tmp_path / "result.yaml"
    result = _example_result(example_scenario)
    scenario_io.save(path, result, scenario=example_scenario, mode="major", objective="balance")
    doc = scenario_io.load_result(path)
    assert doc.mode == "major"
    assert doc.value == -17.0
    assert doc.within_capacity
    (block,) = doc.blocks
    assert block.counts == [3, 2, 2]
    assert block.trace == [[5, 2, 0], [4, 2, 1], [3, 2, 2]]
    assert block.prices_raw[block.price_source] == 0.0
    assert sorted(len(slots) for slots in block.profiles) == [1, 1, 1, 2, 2]
    assert len(doc.satisfaction) == 1
    np.testing.assert_allclose(doc.satisfaction[0].optimized, [1.0, 1.0, 1.0])


def test_result_needs_context(tmp_path, example_scenario):
    with pytest.raises(ContractError):
        scenario_io.save(tmp_path / "r.yaml", _example_result(example_scenario), mode="major")


def test_scenario_is_not_a_result(example_path):
    with pytest.raises(ScenarioValidationError):
        scenario_io.load_result(example_path)


def test_empty_customer_list(example_path):
    data = _example_doc(example_path)
    data["customers"] = []
    assert scenario_io.parse_scenario(data).K == 0
