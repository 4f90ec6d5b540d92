"""JSON file formats: instances, multi-school instances, targets, results.

All documents are schema-validated and unknown keys are rejected. Output is
byte-deterministic: sorted keys, two-space indent, trailing newline, ratios
as exact "p/q" strings.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Iterable, Mapping, Optional

import jsonschema

from .baseline import BaselineResult
from .gda import MultiInstance, MultiMatching, School
from .model import (
    ChoiceResult,
    GroupKey,
    Instance,
    MalformedInstanceError,
    Ratio,
    StudentRecord,
    group_counts,
    group_label,
    parse_group_label,
)


class InstanceFormatError(ValueError):
    """Raised for unreadable, schema-violating or incoherent input files."""


_QUOTAS_SCHEMA = {
    "type": "array",
    "items": {
        "type": "object",
        "additionalProperties": False,
        "required": ["type", "rank", "quota"],
        "properties": {
            "type": {"type": "string"},
            "rank": {"type": "integer", "minimum": 1},
            "quota": {"type": "integer", "minimum": 0},
        },
    },
}

_STUDENTS_SCHEMA = {
    "type": "array",
    "items": {
        "type": "object",
        "additionalProperties": False,
        "required": ["id", "types"],
        "properties": {
            "id": {"type": "string"},
            "types": {"type": "array", "items": {"type": "string"}},
        },
    },
}

_PRIORITY_SCHEMA = {"type": "array", "items": {"type": "string"}}

INSTANCE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["capacity", "types", "quotas", "students", "priority"],
    "properties": {
        "capacity": {"type": "integer", "minimum": 0},
        "types": {"type": "array", "items": {"type": "string"}},
        "quotas": _QUOTAS_SCHEMA,
        "students": _STUDENTS_SCHEMA,
        "priority": _PRIORITY_SCHEMA,
    },
}

MULTI_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["types", "students", "schools", "preferences"],
    "properties": {
        "types": {"type": "array", "items": {"type": "string"}},
        "students": _STUDENTS_SCHEMA,
        "schools": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["id", "capacity", "quotas", "priority"],
                "properties": {
                    "id": {"type": "string"},
                    "capacity": {"type": "integer", "minimum": 0},
                    "quotas": _QUOTAS_SCHEMA,
                    "priority": _PRIORITY_SCHEMA,
                },
            },
        },
        "preferences": {
            "type": "object",
            "additionalProperties": {
                "type": "array",
                "items": {"type": "string"},
            },
        },
    },
}

TARGETS_SCHEMA = {
    "type": "object",
    "additionalProperties": {"type": "integer", "minimum": 0},
}

SELECTED_SCHEMA = {
    "type": "object",
    "required": ["selected"],
    "properties": {
        "selected": {"type": "array", "items": {"type": "string"}},
    },
}


def _validated(payload: Any, schema: Mapping[str, Any], what: str) -> Any:
    try:
        jsonschema.validate(payload, schema)
    except jsonschema.ValidationError as err:
        where = "/".join(str(p) for p in err.absolute_path) or "document root"
        raise InstanceFormatError(f"bad {what}: {err.message} (at {where})") from err
    return payload


def _read_json(path: str, what: str) -> Any:
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as err:
        raise InstanceFormatError(f"cannot read {what} {path!r}: {err}") from err
    except json.JSONDecodeError as err:
        raise InstanceFormatError(f"{what} {path!r} is not JSON: {err}") from err


def _quotas_from_payload(raw: list[dict]) -> dict[tuple[str, int], int]:
    quotas: dict[tuple[str, int], int] = {}
    for entry in raw:
        key = (entry["type"], entry["rank"])
        if key in quotas:
            raise InstanceFormatError(
                f"duplicate quota for type {key[0]!r} rank {key[1]}"
            )
        quotas[key] = entry["quota"]
    return quotas


def instance_from_payload(payload: Any) -> Instance:
    """InstanceFile JSON value to a validated Instance."""
    _validated(payload, INSTANCE_SCHEMA, "instance file")
    try:
        return Instance(
            students=[
                StudentRecord(s["id"], frozenset(s["types"]))
                for s in payload["students"]
            ],
            capacity=payload["capacity"],
            priority=payload["priority"],
            types=payload["types"],
            quotas=_quotas_from_payload(payload["quotas"]),
        )
    except MalformedInstanceError as err:
        raise InstanceFormatError(str(err)) from err


def instance_to_payload(instance: Instance) -> dict[str, Any]:
    return {
        "capacity": instance.capacity,
        "types": sorted(instance.types),
        "quotas": [
            {"type": t, "rank": rank, "quota": count}
            for (t, rank), count in sorted(instance.quotas.items())
        ],
        "students": [
            {"id": s.id, "types": sorted(s.type_set)} for s in instance.students
        ],
        "priority": list(instance.priority),
    }


def multi_from_payload(payload: Any) -> MultiInstance:
    """Multi-school JSON value to a validated MultiInstance."""
    _validated(payload, MULTI_SCHEMA, "multi-school file")
    try:
        return MultiInstance(
            students=[
                StudentRecord(s["id"], frozenset(s["types"]))
                for s in payload["students"]
            ],
            types=payload["types"],
            schools=[
                School(
                    id=c["id"],
                    capacity=c["capacity"],
                    priority=tuple(c["priority"]),
                    quotas=_quotas_from_payload(c["quotas"]),
                )
                for c in payload["schools"]
            ],
            preferences=payload["preferences"],
        )
    except MalformedInstanceError as err:
        raise InstanceFormatError(str(err)) from err


def load_instance(path: str) -> Instance:
    return instance_from_payload(_read_json(path, "instance file"))


def load_multi(path: str) -> MultiInstance:
    return multi_from_payload(_read_json(path, "multi-school file"))


def load_targets(path: str, instance: Instance) -> dict[GroupKey, int]:
    """Targets file (group label to integer) resolved against the instance."""
    payload = _validated(
        _read_json(path, "targets file"), TARGETS_SCHEMA, "targets file"
    )
    known = {g.key for g in instance.groups()}
    targets: dict[GroupKey, int] = {}
    for label, value in payload.items():
        key = parse_group_label(label)
        if key not in known:
            raise InstanceFormatError(f"targets name unknown group {label!r}")
        if key in targets:
            raise InstanceFormatError(f"targets repeat group {label!r}")
        targets[key] = value
    return targets


def load_selected(path: str) -> list[str]:
    """Selected ids from a result file (extra result keys are ignored)."""
    payload = _validated(
        _read_json(path, "result file"), SELECTED_SCHEMA, "result file"
    )
    selected = payload["selected"]
    if len(set(selected)) != len(selected):
        raise InstanceFormatError("result file repeats a student id")
    return selected


def choice_counts_by_label(
    instance: Instance, matching: Mapping[str, Any]
) -> dict[str, int]:
    """Per-group counts of a matching's students, keyed by group label."""
    counts = group_counts(instance, matching.keys())
    return {group_label(key): value for key, value in counts.items()}


def fraction_str(value: Ratio) -> str:
    frac = Fraction(value)
    return f"{frac.numerator}/{frac.denominator}"


def _sorted_by_priority(instance: Instance, ids: Iterable[str]) -> list[str]:
    return sorted(ids, key=lambda sid: instance.priority_index[sid])


def choice_result_payload(
    instance: Instance, result: ChoiceResult, backend: str
) -> dict[str, Any]:
    """ResultFile payload for a solver run."""
    return {
        "alpha": fraction_str(result.alpha),
        "targets": {
            group_label(key): value for key, value in result.targets.items()
        },
        "selected": _sorted_by_priority(instance, result.selected),
        "per_group": {
            group_label(key): value
            for key, value in result.per_group_counts.items()
        },
        "signature": list(result.signature),
        "backend": backend,
    }


def baseline_result_payload(
    instance: Instance, result: BaselineResult
) -> dict[str, Any]:
    """ResultFile payload for the sequential baseline.

    alpha reports the ratio the baseline achieved; there are no targets.
    """
    return {
        "alpha": fraction_str(result.min_ratio),
        "targets": {},
        "selected": _sorted_by_priority(instance, result.selected),
        "per_group": {
            group_label(key): value
            for key, value in result.per_group_counts.items()
        },
        "signature": list(result.signature),
        "backend": "baseline",
    }


def gda_result_payload(result: MultiMatching) -> dict[str, Any]:
    """ResultFile payload for a multi-school run, with the round trace."""
    return {
        "backend": "gda",
        "matched": {
            cid: sorted(children)
            for cid, children in result.per_school.items()
        },
        "unmatched": sorted(
            sid for sid, cid in result.assignment.items() if cid is None
        ),
        "rounds": [
            {
                "round": rt.number,
                "proposals": {cid: list(ids) for cid, ids in rt.proposals.items()},
                "pools": {cid: list(ids) for cid, ids in rt.pools.items()},
                "selected": {cid: list(ids) for cid, ids in rt.selected.items()},
                "rejected": {cid: list(ids) for cid, ids in rt.rejected.items()},
            }
            for rt in result.rounds
        ],
    }


def dump_json(payload: Any) -> str:
    """Canonical byte form: sorted keys, two-space indent, trailing newline."""
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_text(text: str, out: Optional[str]) -> None:
    if out is None:
        print(text, end="")
    else:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)
