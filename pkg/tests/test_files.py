"""Unit tests for the JSON file formats and payload builders."""

from __future__ import annotations

import json
from fractions import Fraction

import pytest
from factories import two_group_school

from reserve_match.baseline import sequential_baseline
from reserve_match.files import (
    InstanceFormatError,
    baseline_result_payload,
    choice_result_payload,
    dump_json,
    fraction_str,
    instance_from_payload,
    instance_to_payload,
    load_instance,
    load_multi,
    load_selected,
    load_targets,
    multi_from_payload,
    write_text,
)
from reserve_match.flow import choice_flow


def instance_payload() -> dict:
    return {
        "capacity": 2,
        "types": ["t1"],
        "quotas": [{"type": "t1", "rank": 1, "quota": 1}],
        "students": [
            {"id": "s1", "types": ["t1"]},
            {"id": "s2", "types": ["t1"]},
            {"id": "s3", "types": []},
            {"id": "s4", "types": []},
        ],
        "priority": ["s4", "s3", "s2", "s1"],
    }


def test_instance_payload_round_trip():
    instance = instance_from_payload(instance_payload())
    assert instance.capacity == 2
    assert instance.quotas == {("t1", 1): 1}
    assert instance_to_payload(instance) == instance_payload()


def test_instance_payload_rejects_schema_violations():
    bad = instance_payload()
    del bad["priority"]
    with pytest.raises(InstanceFormatError, match="priority"):
        instance_from_payload(bad)
    bad = instance_payload()
    bad["capacity"] = -2
    with pytest.raises(InstanceFormatError, match="capacity"):
        instance_from_payload(bad)
    bad = instance_payload()
    bad["quotas"][0]["rank"] = 0
    with pytest.raises(InstanceFormatError, match="rank"):
        instance_from_payload(bad)
    bad = instance_payload()
    bad["extra"] = True
    with pytest.raises(InstanceFormatError, match="extra"):
        instance_from_payload(bad)


def test_instance_payload_rejects_duplicate_quota_entries():
    bad = instance_payload()
    bad["quotas"].append({"type": "t1", "rank": 1, "quota": 2})
    with pytest.raises(InstanceFormatError, match="duplicate quota"):
        instance_from_payload(bad)


def test_instance_payload_wraps_model_errors():
    bad = instance_payload()
    bad["students"][0]["id"] = "s2"
    with pytest.raises(InstanceFormatError, match="duplicate"):
        instance_from_payload(bad)


def test_load_instance_io_errors(tmp_path):
    missing = tmp_path / "missing.json"
    with pytest.raises(InstanceFormatError, match="cannot read"):
        load_instance(str(missing))
    garbled = tmp_path / "garbled.json"
    garbled.write_text("{not json", encoding="utf-8")
    with pytest.raises(InstanceFormatError, match="not JSON"):
        load_instance(str(garbled))


def test_load_targets(tmp_path):
    instance = two_group_school()
    path = tmp_path / "targets.json"
    path.write_text(json.dumps({"t1": 1, "none": 1}), encoding="utf-8")
    assert load_targets(str(path), instance) == {("t1",): 1, (): 1}

    path.write_text(json.dumps({"t9": 1}), encoding="utf-8")
    with pytest.raises(InstanceFormatError, match="unknown group"):
        load_targets(str(path), instance)

    path.write_text(json.dumps({"t1": -1}), encoding="utf-8")
    with pytest.raises(InstanceFormatError, match="bad targets"):
        load_targets(str(path), instance)


def test_load_selected(tmp_path):
    path = tmp_path / "result.json"
    path.write_text(
        json.dumps({"selected": ["s4", "s2"], "alpha": "1/2"}), encoding="utf-8"
    )
    assert load_selected(str(path)) == ["s4", "s2"]
    path.write_text(json.dumps({"selected": ["s4", "s4"]}), encoding="utf-8")
    with pytest.raises(InstanceFormatError, match="repeats"):
        load_selected(str(path))
    path.write_text(json.dumps({"alpha": "1/2"}), encoding="utf-8")
    with pytest.raises(InstanceFormatError, match="selected"):
        load_selected(str(path))


def test_multi_payload_round_trip_and_errors():
    payload = {
        "types": ["t1"],
        "students": [{"id": "a", "types": ["t1"]}, {"id": "b", "types": []}],
        "schools": [
            {
                "id": "X",
                "capacity": 1,
                "quotas": [{"type": "t1", "rank": 1, "quota": 1}],
                "priority": ["a", "b"],
            }
        ],
        "preferences": {"a": ["X"]},
    }
    multi = multi_from_payload(payload)
    assert multi.school_by_id("X").quotas == {("t1", 1): 1}
    bad = dict(payload)
    bad["preferences"] = {"a": ["Z"]}
    with pytest.raises(InstanceFormatError, match="unknown schools"):
        multi_from_payload(bad)


def test_load_multi(tmp_path):
    path = tmp_path / "multi.json"
    path.write_text(
        json.dumps(
            {
                "types": [],
                "students": [],
                "schools": [],
                "preferences": {},
            }
        ),
        encoding="utf-8",
    )
    multi = load_multi(str(path))
    assert multi.schools == ()


def test_fraction_str_exact():
    assert fraction_str(Fraction(1, 2)) == "1/2"
    assert fraction_str(Fraction(0)) == "0/1"
    assert fraction_str(Fraction(4, 8)) == "1/2"


def test_choice_result_payload_fields():
    instance = two_group_school()
    payload = choice_result_payload(instance, choice_flow(instance), "flow")
    assert payload == {
        "alpha": "1/2",
        "targets": {"none": 1, "t1": 1},
        "selected": ["s4", "s2"],
        "per_group": {"none": 1, "t1": 1},
        "signature": [1, 1],
        "backend": "flow",
    }


def test_baseline_result_payload_fields():
    instance = two_group_school()
    payload = baseline_result_payload(instance, sequential_baseline(instance))
    assert payload["backend"] == "baseline"
    assert payload["targets"] == {}
    assert payload["selected"] == ["s4", "s2"]
    assert payload["alpha"] == "1/2"


def test_dump_json_is_canonical():
    text = dump_json({"b": 1, "a": [2, 1]})
    assert text == '{\n  "a": [\n    2,\n    1\n  ],\n  "b": 1\n}\n'
    assert dump_json({"a": 1, "b": 2}) == dump_json({"b": 2, "a": 1})


def test_write_text_to_file_and_stdout(tmp_path, capsys):
    out = tmp_path / "out.json"
    write_text("payload\n", str(out))
    assert out.read_text(encoding="utf-8") == "payload\n"
    write_text("to-console\n", None)
    assert capsys.readouterr().out == "to-console\n"
