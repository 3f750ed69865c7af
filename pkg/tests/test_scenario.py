import json

import pytest

from rescuedispatch.core import ScenarioError
from rescuedispatch.scenario import (
    dump_scenario,
    load_scenario,
    task_from_dict,
    task_to_dict,
)


def minimal_doc(**overrides):
    doc = {
        "format": "scenario/1",
        "name": "mini",
        "epoch": "1970-01-01",
        "config": {"weights": {"labels": {"flood": 1.5}, "env": {"storm": 1.0}}},
        "units": [{"id": "u1"}],
        "tasks": [{"id": "a", "arrival": "01:00", "burst": 30,
                   "labels": {"flood": 1}}],
        "distance_matrix": {"base": {"a": 2.0}},
    }
    doc.update(overrides)
    return doc


class TestLoad:
    def test_port_arthur_checks_out(self, portarthur):
        assert len(portarthur.tasks) == 10
        assert len(portarthur.units) == 2
        priorities = [t.priority for t in portarthur.tasks]
        assert priorities == [7.0, 2.0, 5.0, 5.0, 1.0, 2.0, 8.0, 7.0, 5.0, 6.0]
        assert all(not t.priority_pinned for t in portarthur.tasks)

    def test_minimal_roundtrip(self):
        scenario = load_scenario(minimal_doc())
        assert scenario.tasks[0].priority == 1.5  # flood flag times its weight
        assert scenario.tasks[0].location == "a"

    def test_duplicate_task_ids_rejected(self):
        doc = minimal_doc()
        doc["tasks"].append(dict(doc["tasks"][0]))
        with pytest.raises(ScenarioError, match="duplicate"):
            load_scenario(doc)

    def test_problems_are_collected_not_first_only(self):
        doc = minimal_doc()
        doc["format"] = "nope"
        doc["tasks"][0]["burst"] = -3
        doc["tasks"].append({"id": "b", "arrival": "9:99", "burst": 10})
        try:
            load_scenario(doc)
            raise AssertionError("expected ScenarioError")
        except ScenarioError as exc:
            text = "; ".join(exc.problems)
            assert "format" in text
            assert "burst" in text
            assert "9:99" in text or "time" in text

    def test_task_without_location_or_distance(self):
        doc = minimal_doc(distance_matrix={"base": {}})
        with pytest.raises(ScenarioError, match="distance"):
            load_scenario(doc)

    def test_distance_from_base_contributes_matrix_entry(self):
        doc = minimal_doc(distance_matrix={"base": {}})
        doc["tasks"][0]["distance_from_base"] = 4.2
        scenario = load_scenario(doc)
        assert scenario.distance.miles("base", "a") == 4.2

    def test_env_key_without_weight_is_reported(self):
        doc = minimal_doc()
        doc["tasks"][0]["env"] = {"aftershock": 1}
        with pytest.raises(ScenarioError, match="aftershock"):
            load_scenario(doc)


class TestUnitsFor:
    def test_truncates_and_pads(self, portarthur):
        assert len(portarthur.units_for(1)) == 1
        four = portarthur.units_for(4)
        assert [u.id for u in four] == ["unit-1", "unit-2", "unit-3", "unit-4"]
        assert four[3].available_at == four[1].available_at
        assert four[3].capacity == four[1].capacity

    def test_rejects_non_positive(self, portarthur):
        with pytest.raises(ScenarioError):
            portarthur.units_for(0)


class TestTaskDict:
    def test_round_trip_preserves_computed_priority(self, portarthur):
        task = portarthur.tasks[0]
        doc = task_to_dict(task)
        again = task_from_dict(doc, portarthur.weights, matrix_mode=True)
        assert again.priority == task.priority
        assert again.priority_pinned == task.priority_pinned

    def test_pinned_priority_survives(self, portarthur):
        doc = {"id": "x", "arrival": 0, "burst": 10, "priority": 9.0}
        task = task_from_dict(doc, portarthur.weights, matrix_mode=True)
        assert task.priority == 9.0 and task.priority_pinned
        again = task_from_dict(task_to_dict(task), portarthur.weights, True)
        assert again.priority == 9.0 and again.priority_pinned


def test_dump_is_stable():
    doc = minimal_doc()
    assert dump_scenario(doc) == dump_scenario(json.loads(json.dumps(doc)))
