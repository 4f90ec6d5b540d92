"""Ranked-reservation-graph backend: alternating-path search and the
matching-surgery algorithms for validity checking and the choice function.

Seats of one (type, rank) class are interchangeable, so the search runs on a
quotient graph whose seat side has one node per class with a multiplicity;
concrete seat indices appear only in returned matchings and paths. The
initial rank-maximal matching is delegated to the flow backend and decomposed
(one canonical optimizer); the surgery here then works natively on the graph.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

from . import flow
from .model import (
    GENERAL_TYPE,
    ChoiceResult,
    GroupKey,
    Instance,
    InternalInvariantError,
    Seat,
    SeatMatching,
    Signature,
    TargetVector,
    check_matching,
    group_label,
    matching_group_counts,
    matching_signature,
)

# A seat class: (type name, rank).
SeatClass = tuple[str, int]

# Endpoints handed to goal predicates: a matched student id or a free Seat.
PathEnd = Union[str, Seat]


class RankedReservationGraph:
    """Quotient view of the bipartite students-vs-seats graph.

    class_caps lists every (type, rank) class with its seat count (zero-cap
    classes are dropped; they have no vertices). student_classes is the only
    per-student structure and is the part that grows with |S|.
    """

    def __init__(self, instance: Instance) -> None:
        self.instance = instance
        self.max_rank = instance.max_rank
        caps: dict[SeatClass, int] = {}
        for t in sorted(instance.types):
            for j in range(1, instance.max_rank + 1):
                cap = instance.quotas.get((t, j), 0)
                if cap:
                    caps[(t, j)] = cap
        if instance.capacity:
            caps[(GENERAL_TYPE, instance.max_rank)] = instance.capacity
        self.class_caps = caps

        by_key: dict[frozenset[str], tuple[SeatClass, ...]] = {}
        self.student_classes: dict[str, tuple[SeatClass, ...]] = {}
        for s in instance.students:
            if s.type_set not in by_key:
                classes = [
                    c
                    for c in caps
                    if c[0] == GENERAL_TYPE or c[0] in s.type_set
                ]
                classes.sort(key=lambda c: (c[1], c[0]))
                by_key[s.type_set] = tuple(classes)
            self.student_classes[s.id] = by_key[s.type_set]

    @property
    def seat_count(self) -> int:
        return sum(self.class_caps.values())

    @property
    def edge_count(self) -> int:
        return sum(
            self.class_caps[c]
            for classes in self.student_classes.values()
            for c in classes
        )


def build_graph(instance: Instance) -> RankedReservationGraph:
    return RankedReservationGraph(instance)


class _MatchingState:
    """Mutable class-level matching with capacity bookkeeping.

    Holder containers are insertion-ordered dicts, not sets, so search and
    surgery stay deterministic under hash randomization.
    """

    def __init__(
        self, graph: RankedReservationGraph, matching: Optional[SeatMatching] = None
    ) -> None:
        self.graph = graph
        self.assigned: dict[str, SeatClass] = {}
        self.holders: dict[SeatClass, dict[str, None]] = {
            c: {} for c in graph.class_caps
        }
        if matching:
            for sid, seat in matching.items():
                self.assign(sid, (seat.type, seat.rank))

    def free_cap(self, c: SeatClass) -> int:
        return self.graph.class_caps[c] - len(self.holders[c])

    def assign(self, sid: str, c: SeatClass) -> None:
        if sid in self.assigned:
            raise InternalInvariantError(f"{sid} already matched")
        if self.free_cap(c) <= 0:
            raise InternalInvariantError(f"class {c} is full")
        self.assigned[sid] = c
        self.holders[c][sid] = None

    def unassign(self, sid: str) -> SeatClass:
        c = self.assigned.pop(sid)
        del self.holders[c][sid]
        return c

    def signature(self) -> Signature:
        sig = [0] * self.graph.max_rank
        for (_t, j), held in self.holders.items():
            sig[j - 1] += len(held)
        return tuple(sig)

    def group_counts(self) -> dict[GroupKey, int]:
        counts = {g.key: 0 for g in self.graph.instance.groups()}
        for sid in self.assigned:
            counts[self.graph.instance.group_of(sid)] += 1
        return counts

    def to_matching(self) -> SeatMatching:
        by_priority = self.graph.instance.priority_index
        matching: SeatMatching = {}
        for c in sorted(self.holders):
            ordered = sorted(self.holders[c], key=lambda sid: by_priority[sid])
            for i, sid in enumerate(ordered, start=1):
                matching[sid] = Seat(type=c[0], rank=c[1], index=i)
        return matching


def _explore(
    state: _MatchingState, start: str
) -> tuple[dict[str, SeatClass], dict[SeatClass, str], list[tuple[str, object]]]:
    """Breadth-first alternating search from an unmatched student.

    Returns parent maps (student reached via matched edge from class; class
    reached via unmatched edge from student) and the endpoint log in
    discovery order: ("student", sid) for matched students and ("class", c)
    for classes with free capacity. BFS discovery order is shortest-first.
    """
    if start in state.assigned:
        raise ValueError(f"{start} is matched; search starts unmatched")
    parent_of_class: dict[SeatClass, str] = {}
    parent_of_student: dict[str, SeatClass] = {}
    endpoints: list[tuple[str, object]] = []
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for c in state.graph.student_classes[x]:
            if c in parent_of_class:
                continue
            parent_of_class[c] = x
            if state.free_cap(c) > 0:
                endpoints.append(("class", c))
            for h in state.holders[c]:
                if h in seen:
                    continue
                seen.add(h)
                parent_of_student[h] = c
                endpoints.append(("student", h))
                queue.append(h)
    return parent_of_student, parent_of_class, endpoints


def _class_path(
    parent_of_student: dict[str, SeatClass],
    parent_of_class: dict[SeatClass, str],
    end: tuple[str, object],
) -> list[object]:
    """Node sequence from the start student to the endpoint, at class level."""
    nodes: list[object] = []
    kind, node = end
    if kind == "student":
        nodes.append(node)
        node = parent_of_student[node]  # type: ignore[index]
    while True:
        nodes.append(node)
        sid = parent_of_class[node]
        nodes.append(sid)
        if sid not in parent_of_student:
            break
        node = parent_of_student[sid]
    nodes.reverse()
    return nodes


def _apply_class_path(state: _MatchingState, nodes: list[object]) -> None:
    """M <- M xor P at class level; node list alternates student, class, ...

    A trailing student is the displaced endpoint and becomes unmatched; a
    trailing class is an augmenting end and gains one unit. Applied from the
    end so capacity never overflows mid-flight.
    """
    before = state.signature()
    size_before = len(state.assigned)
    if isinstance(nodes[-1], str):
        state.unassign(nodes[-1])
        top = len(nodes) - 3
        growth = 0
    else:
        top = len(nodes) - 2
        growth = 1
    for i in range(top, -1, -2):
        sid = nodes[i]
        if sid in state.assigned:
            state.unassign(sid)
        state.assign(sid, nodes[i + 1])
    if isinstance(nodes[-1], str):
        if state.signature() != before:
            raise InternalInvariantError("displacement changed the signature")
    if len(state.assigned) != size_before + growth:
        raise InternalInvariantError("surgery changed the matching size oddly")


@dataclass(frozen=True)
class AlternatingPath:
    """Alternating path with concrete seats.

    nodes alternates student ids and Seat objects, starting at an unmatched
    student. A final Seat is a free seat (augmenting path, see rank); a final
    student id is a matched student who would be displaced by M xor P.
    """

    nodes: tuple[Union[str, Seat], ...]

    @property
    def augmenting(self) -> bool:
        return isinstance(self.nodes[-1], Seat)

    @property
    def end(self) -> Union[str, Seat]:
        return self.nodes[-1]

    @property
    def rank(self) -> Optional[int]:
        """Rank of the free seat for augmenting paths, else None."""
        return self.nodes[-1].rank if self.augmenting else None


def _free_seat(matching: SeatMatching, c: SeatClass, cap: int) -> Seat:
    used = {seat.index for seat in matching.values() if (seat.type, seat.rank) == c}
    for i in range(1, cap + 1):
        if i not in used:
            return Seat(type=c[0], rank=c[1], index=i)
    raise InternalInvariantError(f"no free index in class {c}")


def find_alternating_path(
    graph: RankedReservationGraph,
    matching: SeatMatching,
    start: str,
    goal: Callable[[PathEnd], bool],
) -> Optional[AlternatingPath]:
    """Shortest alternating path from an unmatched student to a goal endpoint.

    goal receives either a matched student id (displacement end) or a free
    Seat (augmenting end) and says whether that endpoint qualifies. Returns
    None when no qualifying endpoint is reachable.
    """
    state = _MatchingState(graph, matching)
    parent_of_student, parent_of_class, endpoints = _explore(state, start)
    for kind, node in endpoints:
        if kind == "student":
            concrete: PathEnd = node  # type: ignore[assignment]
        else:
            concrete = _free_seat(matching, node, graph.class_caps[node])
        if not goal(concrete):
            continue
        nodes = _class_path(parent_of_student, parent_of_class, (kind, node))
        pretty: list[Union[str, Seat]] = []
        for i, item in enumerate(nodes):
            if isinstance(item, str):
                pretty.append(item)
            elif i + 1 < len(nodes):
                pretty.append(matching[nodes[i + 1]])
            else:
                pretty.append(concrete)
        return AlternatingPath(nodes=tuple(pretty))
    return None


def apply_path(
    instance: Instance, matching: SeatMatching, path: AlternatingPath
) -> SeatMatching:
    """M xor P with concrete seats; returns the new matching."""
    result = dict(matching)
    nodes = path.nodes
    if isinstance(nodes[-1], str):
        del result[nodes[-1]]
        top = len(nodes) - 3
    else:
        top = len(nodes) - 2
    for i in range(top, -1, -2):
        result[nodes[i]] = nodes[i + 1]
    check_matching(instance, result)
    return result


def rank_maximal_matching(
    graph: RankedReservationGraph, cap: Optional[int] = None
) -> SeatMatching:
    """A matching of size min(|S|, cap) with lexicographically maximal signature.

    Computed by decomposing a min-cost max-flow on the reserve network; the
    cost encoding makes the two optima coincide.
    """
    instance = graph.instance
    if cap is not None and cap != instance.capacity:
        instance = Instance(
            students=instance.students,
            capacity=cap,
            priority=instance.priority,
            types=instance.types,
            quotas=instance.quotas,
        )
    network = flow.build_network(instance)
    best = flow.min_cost_max_flow(network)
    return flow.flow_to_matching(instance, best, network=network)


def check_validity_graph(
    instance: Instance,
    targets: TargetVector,
    *,
    graph: Optional[RankedReservationGraph] = None,
) -> Optional[SeatMatching]:
    """Rank-maximal witness matching meeting the targets, or None.

    Starts from any rank-maximal matching, protects per group the top
    min(target, matched) students, then pulls unmatched students in by either
    displacing an unprotected matched student (alternating path) or taking a
    free seat while removing an unprotected matched edge of the same rank
    (augmenting path plus equal-rank removal). Both moves keep the signature,
    so the result stays rank-maximal. Some rebalances need several moves at
    once, so when path surgery cannot top up a group the verdict is delegated
    to the lower-bounded flow solve and its witness is decomposed instead.
    """
    g = graph if graph is not None else build_graph(instance)
    groups = instance.groups()
    wanted = dict(targets)
    unknown = set(wanted) - {grp.key for grp in groups}
    if unknown:
        raise ValueError(f"targets for unknown groups: {sorted(unknown)}")
    if any(v < 0 for v in wanted.values()):
        raise ValueError("negative target")

    state = _MatchingState(g, rank_maximal_matching(g))
    protected: dict[str, None] = {}
    chosen: dict[GroupKey, int] = {}
    for grp in groups:
        want = wanted.get(grp.key, 0)
        have = 0
        for sid in grp.members:
            if have == want:
                break
            if sid in state.assigned:
                protected[sid] = None
                have += 1
        chosen[grp.key] = have

    for grp in groups:
        want = wanted.get(grp.key, 0)
        while chosen[grp.key] < want:
            entrant = next(
                (sid for sid in grp.members if sid not in state.assigned), None
            )
            if entrant is None:
                break
            if _admit(instance, state, protected, entrant) is None:
                break
            protected[entrant] = None
            chosen[grp.key] += 1
        if chosen[grp.key] < want:
            net = flow.build_network(instance)
            witness = flow.check_validity_flow(instance, wanted, network=net)
            if witness is None:
                return None
            return flow.flow_to_matching(instance, witness, network=net)
    return state.to_matching()


def _admit(
    instance: Instance,
    state: _MatchingState,
    protected: dict[str, None],
    entrant: str,
    extra_victim_test: Optional[Callable[[str], bool]] = None,
) -> Optional[str]:
    """Try to add entrant to the matching without changing the signature.

    Victims are matched, unprotected students tried lowest priority first
    (optionally filtered further), so every group keeps its top members
    matched. Either the victim is displaced directly by an alternating path,
    or an augmenting path reaches a free seat of the victim's rank and the
    victim's edge is removed. Returns the displaced victim, or None if no
    victim admits either move.
    """
    before = state.signature()
    parent_of_student, parent_of_class, endpoints = _explore(state, entrant)
    free_ranks: dict[int, SeatClass] = {}
    for kind, node in endpoints:
        if kind == "class" and node[1] not in free_ranks:
            free_ranks[node[1]] = node
    victims = [
        sid
        for sid in reversed(instance.priority)
        if sid in state.assigned
        and sid not in protected
        and (extra_victim_test is None or extra_victim_test(sid))
    ]
    for victim in victims:
        if victim in parent_of_student:
            nodes = _class_path(
                parent_of_student, parent_of_class, ("student", victim)
            )
            _apply_class_path(state, nodes)
            if state.signature() != before:
                raise InternalInvariantError("displacement changed the signature")
            return victim
        rank = state.assigned[victim][1]
        if rank in free_ranks:
            nodes = _class_path(
                parent_of_student, parent_of_class, ("class", free_ranks[rank])
            )
            _apply_class_path(state, nodes)
            state.unassign(victim)
            if state.signature() != before:
                raise InternalInvariantError(
                    "equal-rank substitution changed the signature"
                )
            return victim
    return None


def choice_graph(
    instance: Instance,
    crucial: Optional[TargetVector] = None,
    seed_matching: Optional[SeatMatching] = None,
) -> ChoiceResult:
    """Maximum balanced selection via matching surgery.

    crucial must be the instance's crucial vector (computed when omitted).
    The seed must be a full-size rank-maximal matching meeting crucial; it is
    normalized so every group's slots go to its top-priority members, then
    students are walked in descending priority: matched students are kept,
    and an unmatched student may displace a kept-out matched student whose
    group sits strictly above its target. Admissions that need a wider
    rebalance than one alternating path are decided by a lower-bounded flow
    solve whose witness replaces the working matching.
    """
    g = build_graph(instance)
    groups = instance.groups()
    alpha: Optional[Fraction] = None
    if crucial is None:
        alpha, crucial = flow.crucial_vector(instance)
    targets = {grp.key: int(crucial.get(grp.key, 0)) for grp in groups}
    if seed_matching is None:
        seed_matching = check_validity_graph(instance, targets, graph=g)
        if seed_matching is None:
            raise ValueError("crucial targets are not valid for this instance")

    expected_size = min(len(instance.students), instance.capacity)
    if len(seed_matching) != expected_size:
        raise ValueError("seed matching must have full size")
    network = flow.build_network(instance)
    cert = flow.compute_certificate(network)
    lifted = flow.matching_to_flow(instance, seed_matching, network=network)
    if (lifted.value, lifted.cost) != (cert.max_value, cert.min_cost):
        raise ValueError("seed matching is not rank-maximal")

    state = _MatchingState(g, seed_matching)
    counts = state.group_counts()
    if any(counts[grp.key] < targets[grp.key] for grp in groups):
        raise ValueError("seed matching does not meet the crucial targets")

    # normalization: within each group, hand the held slots to the group's
    # top-priority members, best member on the best rank
    for grp in groups:
        held = [sid for sid in grp.members if sid in state.assigned]
        slots = sorted((state.unassign(sid) for sid in held), key=lambda c: (c[1], c[0]))
        for sid, c in zip(grp.members, slots):
            state.assign(sid, c)

    signature = state.signature()
    selected: dict[str, None] = {}
    kept: dict[GroupKey, int] = {grp.key: 0 for grp in groups}
    # (group, attempted bound) pairs already refuted; later attempts face
    # componentwise larger bounds, so they stay invalid
    dead: set[tuple[GroupKey, int]] = set()
    for sid in instance.priority:
        key = instance.group_of(sid)
        if sid in state.assigned:
            selected[sid] = None
            kept[key] += 1
            continue
        bound = max(targets[key], kept[key] + 1)
        if (key, bound) in dead:
            continue

        def over_target(candidate: str) -> bool:
            grp_key = instance.group_of(candidate)
            return counts[grp_key] > targets[grp_key]

        victim = _admit(instance, state, selected, sid, extra_victim_test=over_target)
        if victim is not None:
            counts[instance.group_of(victim)] -= 1
            counts[key] += 1
            selected[sid] = None
            kept[key] += 1
            continue
        # path surgery missed; the admission may still be possible through a
        # wider rebalance, so ask the lower-bounded solve directly
        lower = {grp.key: max(targets[grp.key], kept[grp.key]) for grp in groups}
        lower[key] = bound
        witness = flow.check_validity_flow(instance, lower, network=network, cert=cert)
        if witness is None:
            dead.add((key, bound))
            continue
        state = _MatchingState(
            g, flow.flow_to_matching(instance, witness, network=network)
        )
        counts = state.group_counts()
        selected[sid] = None
        kept[key] += 1
        if any(held not in state.assigned for held in selected):
            raise InternalInvariantError("rebalance dropped a selected student")
    if state.signature() != signature:
        raise InternalInvariantError("selection loop changed the signature")
    if len(selected) != expected_size:
        raise InternalInvariantError("selection is wasteful")
    if set(selected) != set(state.assigned):
        raise InternalInvariantError("selected set drifted from the matching")
    if counts != state.group_counts():
        raise InternalInvariantError("count bookkeeping drifted")

    if alpha is None:
        alpha = min(
            (Fraction(targets[grp.key], grp.size) for grp in groups),
            default=Fraction(0),
        )
    return ChoiceResult(
        selected=frozenset(selected),
        per_group_counts=counts,
        signature=state.signature(),
        alpha=alpha,
        targets=targets,
    )
