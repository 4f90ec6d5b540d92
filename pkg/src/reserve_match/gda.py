"""Multi-school selection: induced instances, deferred acceptance, probes.

Each round, every unmatched student proposes to their best school that has
not rejected them yet; each school re-applies the balanced choice function
to its held students plus the new proposers. Rejections are permanent, so
every (student, school) proposal happens at most once and the loop ends.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from . import flow
from .model import (
    Instance,
    InternalInvariantError,
    MalformedInstanceError,
    StudentRecord,
)


@dataclass(frozen=True)
class School:
    """One school: capacity, full priority order, ranked quotas."""

    id: str
    capacity: int
    priority: tuple[str, ...]
    quotas: dict[tuple[str, int], int]


class MultiInstance:
    """Students with preference lists over schools sharing one type universe."""

    def __init__(
        self,
        students: Sequence[StudentRecord],
        types: Iterable[str],
        schools: Sequence[School],
        preferences: Mapping[str, Sequence[str]],
    ) -> None:
        self.students: tuple[StudentRecord, ...] = tuple(students)
        self.types: frozenset[str] = frozenset(types)
        self.schools: tuple[School, ...] = tuple(schools)
        self.preferences: dict[str, tuple[str, ...]] = {
            sid: tuple(prefs) for sid, prefs in preferences.items()
        }
        self._validate()

    def _validate(self) -> None:
        school_ids = [c.id for c in self.schools]
        if len(set(school_ids)) != len(school_ids):
            raise MalformedInstanceError("duplicate school id")
        known_schools = set(school_ids)
        known_students = {s.id for s in self.students}
        if len(known_students) != len(self.students):
            raise MalformedInstanceError("duplicate student id")
        for sid, prefs in self.preferences.items():
            if sid not in known_students:
                raise MalformedInstanceError(f"preferences for unknown student {sid!r}")
            if len(set(prefs)) != len(prefs):
                raise MalformedInstanceError(f"student {sid!r} repeats a school")
            unknown = set(prefs) - known_schools
            if unknown:
                raise MalformedInstanceError(
                    f"student {sid!r} ranks unknown schools {sorted(unknown)}"
                )
        # each school must form a coherent single-school instance over all
        # students; this also checks priorities, quota ranks and type names
        for school in self.schools:
            induced_instance(self, school.id, known_students)

    def school_by_id(self, school_id: str) -> School:
        for school in self.schools:
            if school.id == school_id:
                return school
        raise KeyError(f"unknown school {school_id!r}")

    def preference_list(self, student_id: str) -> tuple[str, ...]:
        return self.preferences.get(student_id, ())


def restrict_instance(instance: Instance, keep: Iterable[str]) -> Instance:
    """The same instance with the student set cut down to keep."""
    chosen = set(keep)
    unknown = chosen - {s.id for s in instance.students}
    if unknown:
        raise KeyError(f"unknown student ids: {sorted(unknown)}")
    return Instance(
        students=[s for s in instance.students if s.id in chosen],
        capacity=instance.capacity,
        priority=[sid for sid in instance.priority if sid in chosen],
        types=instance.types,
        quotas=instance.quotas,
    )


def induced_instance(
    multi: MultiInstance, school_id: str, applicants: Iterable[str]
) -> Instance:
    """Single-school instance of one school restricted to an applicant pool."""
    school = multi.school_by_id(school_id)
    chosen = set(applicants)
    unknown = chosen - {s.id for s in multi.students}
    if unknown:
        raise KeyError(f"unknown student ids: {sorted(unknown)}")
    return Instance(
        students=[s for s in multi.students if s.id in chosen],
        capacity=school.capacity,
        priority=[sid for sid in school.priority if sid in chosen],
        types=multi.types,
        quotas=school.quotas,
    )


@dataclass(frozen=True)
class RoundTrace:
    """What happened in one proposal round.

    proposals lists the new proposers per school, pools the full applicant
    set each proposing school evaluated, selected the held students after
    the round (all schools), rejected the students turned away this round.
    """

    number: int
    proposals: dict[str, tuple[str, ...]]
    pools: dict[str, tuple[str, ...]]
    selected: dict[str, tuple[str, ...]]
    rejected: dict[str, tuple[str, ...]]


@dataclass(frozen=True)
class MultiMatching:
    """Final assignment plus the per-round audit trace."""

    assignment: dict[str, Optional[str]]
    per_school: dict[str, frozenset[str]]
    rounds: tuple[RoundTrace, ...]


def run_gda(multi: MultiInstance) -> MultiMatching:
    """Generalized deferred acceptance with the balanced choice function."""
    held: dict[str, frozenset[str]] = {c.id: frozenset() for c in multi.schools}
    refused: dict[str, set[str]] = {s.id: set() for s in multi.students}
    order = [sid for sid in sorted(held)]
    rounds: list[RoundTrace] = []
    limit = len(multi.students) * len(multi.schools) + 1
    while True:
        matched = {sid for chosen in held.values() for sid in chosen}
        proposals: dict[str, list[str]] = {}
        for s in multi.students:
            if s.id in matched:
                continue
            target = next(
                (c for c in multi.preference_list(s.id) if c not in refused[s.id]),
                None,
            )
            if target is not None:
                proposals.setdefault(target, []).append(s.id)
        if not proposals:
            break
        if len(rounds) >= limit:
            raise InternalInvariantError("proposal rounds exceeded |S| * |C|")
        pools: dict[str, tuple[str, ...]] = {}
        rejected: dict[str, tuple[str, ...]] = {}
        for cid in order:
            if cid not in proposals:
                continue
            pool = held[cid] | set(proposals[cid])
            sub = induced_instance(multi, cid, pool)
            chosen = flow.choice_flow(sub).selected
            for sid in pool - chosen:
                refused[sid].add(cid)
            pools[cid] = _by_priority(sub, pool)
            rejected[cid] = _by_priority(sub, pool - chosen)
            held[cid] = chosen
        rounds.append(
            RoundTrace(
                number=len(rounds) + 1,
                proposals={
                    cid: tuple(sorted(proposals[cid])) for cid in sorted(proposals)
                },
                pools=pools,
                selected={
                    cid: tuple(sorted(held[cid])) for cid in order
                },
                rejected=rejected,
            )
        )
    assignment: dict[str, Optional[str]] = {s.id: None for s in multi.students}
    for cid, chosen in held.items():
        for sid in chosen:
            assignment[sid] = cid
    return MultiMatching(
        assignment=assignment, per_school=dict(held), rounds=tuple(rounds)
    )


def _by_priority(instance: Instance, ids: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(ids, key=lambda sid: instance.priority_index[sid]))


@dataclass(frozen=True)
class SubstitutabilityViolation:
    """s2 was rejected from the smaller pool yet selected from the larger."""

    s1: str
    s2: str
    without_s1: frozenset[str]
    with_s1: frozenset[str]


def substitutability_probe(
    instance: Instance, base: Iterable[str], s1: str, s2: str
) -> Optional[SubstitutabilityViolation]:
    """Test the monotone-rejection property on one (base, s1, s2) triple."""
    pool = set(base)
    if s1 in pool or s2 in pool or s1 == s2:
        raise ValueError("s1 and s2 must be distinct students outside the base set")
    small = flow.choice_flow(restrict_instance(instance, pool | {s2})).selected
    large = flow.choice_flow(restrict_instance(instance, pool | {s1, s2})).selected
    if s2 not in small and s2 in large:
        return SubstitutabilityViolation(
            s1=s1, s2=s2, without_s1=small, with_s1=large
        )
    return None
