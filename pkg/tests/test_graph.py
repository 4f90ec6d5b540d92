"""Unit tests for the graph backend: paths, surgery, validity, choice."""

from __future__ import annotations

from fractions import Fraction

import pytest
from factories import (
    displacement_trap_school,
    make_instance,
    two_group_school,
    two_type_column_school,
)

from reserve_match.graph import (
    apply_path,
    build_graph,
    check_validity_graph,
    choice_graph,
    find_alternating_path,
    rank_maximal_matching,
)
from reserve_match.model import (
    GENERAL_TYPE,
    Seat,
    check_matching,
    matching_group_counts,
    matching_signature,
)


def test_graph_shape_two_groups():
    graph = build_graph(two_group_school())
    assert graph.class_caps == {("t1", 1): 1, (GENERAL_TYPE, 2): 2}
    assert graph.seat_count == 3
    # typed students see both classes, untyped students only the general one
    assert graph.student_classes["s1"] == (("t1", 1), (GENERAL_TYPE, 2))
    assert graph.student_classes["s3"] == ((GENERAL_TYPE, 2),)
    assert graph.edge_count == 10


def test_graph_shape_zero_capacity():
    instance = make_instance(
        [("a", ["t1"])], 0, ["a"], ["t1"], {("t1", 1): 1}
    )
    graph = build_graph(instance)
    assert (GENERAL_TYPE, 2) not in graph.class_caps
    assert graph.class_caps == {("t1", 1): 1}
    assert rank_maximal_matching(graph) == {}


def test_find_alternating_path_displacement():
    instance = two_group_school()
    graph = build_graph(instance)
    matching = {"s2": Seat("t1", 1, 1), "s1": Seat(GENERAL_TYPE, 2, 1)}
    path = find_alternating_path(graph, matching, "s3", lambda end: end == "s1")
    assert path is not None
    assert not path.augmenting
    assert path.nodes == ("s3", Seat(GENERAL_TYPE, 2, 1), "s1")
    assert path.rank is None


def test_find_alternating_path_augmenting():
    instance = two_group_school()
    graph = build_graph(instance)
    matching = {"s2": Seat("t1", 1, 1)}
    path = find_alternating_path(
        graph, matching, "s3", lambda end: isinstance(end, Seat)
    )
    assert path is not None
    assert path.augmenting
    assert path.rank == 2
    assert path.nodes == ("s3", Seat(GENERAL_TYPE, 2, 1))


def test_find_alternating_path_none_when_unreachable():
    instance = make_instance(
        [("a", []), ("b", [])], 1, ["a", "b"], ["t1"], {}
    )
    graph = build_graph(instance)
    matching = {"a": Seat(GENERAL_TYPE, 1, 1)}
    # the only general seat is held by a; no goal accepts a matched student
    assert (
        find_alternating_path(
            graph, matching, "b", lambda end: isinstance(end, Seat)
        )
        is None
    )


def test_find_alternating_path_requires_unmatched_start():
    instance = two_group_school()
    graph = build_graph(instance)
    matching = {"s2": Seat("t1", 1, 1)}
    with pytest.raises(ValueError, match="starts unmatched"):
        find_alternating_path(graph, matching, "s2", lambda end: True)


def test_apply_path_displacement_keeps_signature():
    instance = two_group_school()
    graph = build_graph(instance)
    matching = {"s2": Seat("t1", 1, 1), "s1": Seat(GENERAL_TYPE, 2, 1)}
    path = find_alternating_path(graph, matching, "s3", lambda end: end == "s1")
    updated = apply_path(instance, matching, path)
    assert set(updated) == {"s2", "s3"}
    assert matching_signature(instance, updated) == (1, 1)
    check_matching(instance, updated)
    # the original matching is untouched
    assert set(matching) == {"s1", "s2"}


def test_apply_path_augmenting_grows_matching():
    instance = two_group_school()
    graph = build_graph(instance)
    matching = {"s2": Seat("t1", 1, 1)}
    path = find_alternating_path(
        graph, matching, "s4", lambda end: isinstance(end, Seat)
    )
    updated = apply_path(instance, matching, path)
    assert set(updated) == {"s2", "s4"}
    assert matching_signature(instance, updated) == (1, 1)


def test_rank_maximal_matching_two_groups():
    instance = two_group_school()
    matching = rank_maximal_matching(build_graph(instance))
    assert len(matching) == 2
    assert matching_signature(instance, matching) == (1, 1)
    check_matching(instance, matching)


def test_rank_maximal_matching_cap_override():
    instance = two_group_school()
    graph = build_graph(instance)
    small = rank_maximal_matching(graph, cap=1)
    assert len(small) == 1
    assert matching_signature(instance, small) == (1, 0)


def test_check_validity_graph_verdicts():
    instance = two_group_school()
    witness = check_validity_graph(instance, {(): 1, ("t1",): 1})
    assert witness is not None
    check_matching(instance, witness)
    assert matching_signature(instance, witness) == (1, 1)
    counts = matching_group_counts(instance, witness)
    assert counts[()] >= 1 and counts[("t1",)] >= 1

    assert check_validity_graph(instance, {(): 2, ("t1",): 2}) is None
    assert check_validity_graph(instance, {(): 2}) is None
    assert check_validity_graph(instance, {}) is not None


def test_check_validity_graph_rejects_bad_targets():
    instance = two_group_school()
    with pytest.raises(ValueError, match="unknown groups"):
        check_validity_graph(instance, {("t9",): 1})
    with pytest.raises(ValueError, match="negative"):
        check_validity_graph(instance, {(): -1})


def test_check_validity_graph_witness_prefers_top_members():
    # the witness must keep each group's top students, not arbitrary members
    instance = two_group_school()
    witness = check_validity_graph(instance, {(): 1, ("t1",): 1})
    assert set(witness) == {"s4", "s2"}


def test_choice_graph_two_groups():
    result = choice_graph(two_group_school())
    assert result.selected == frozenset({"s2", "s4"})
    assert result.alpha == Fraction(1, 2)
    assert result.signature == (1, 1)
    assert result.per_group_counts == {(): 1, ("t1",): 1}


def test_choice_graph_columns():
    assert choice_graph(two_type_column_school()).selected == frozenset(
        {"s11", "s12", "s21", "s22"}
    )
    assert choice_graph(two_type_column_school(with_extra=True)).selected == frozenset(
        {"s11", "s12", "s13", "s21"}
    )


def test_choice_graph_single_group_takes_top_by_priority():
    instance = make_instance(
        [("a", []), ("b", []), ("c", [])], 2, ["b", "c", "a"], ["t1"], {}
    )
    assert choice_graph(instance).selected == frozenset({"b", "c"})


def test_choice_graph_displacement_order_regression():
    # evicting the highest-priority victim first would strand s0 and select
    # {s1, s2, s3}, breaking the within-group priority prefix
    result = choice_graph(displacement_trap_school())
    assert result.selected == frozenset({"s0", "s1", "s3"})


def test_choice_graph_rejects_bad_seeds():
    instance = two_group_school()
    crucial = {(): 1, ("t1",): 1}
    with pytest.raises(ValueError, match="full size"):
        choice_graph(instance, crucial, {"s2": Seat("t1", 1, 1)})
    not_rank_maximal = {
        "s4": Seat(GENERAL_TYPE, 2, 1),
        "s3": Seat(GENERAL_TYPE, 2, 2),
    }
    with pytest.raises(ValueError, match="not rank-maximal"):
        choice_graph(instance, crucial, not_rank_maximal)
    good_shape = {"s2": Seat("t1", 1, 1), "s1": Seat(GENERAL_TYPE, 2, 1)}
    with pytest.raises(ValueError, match="does not meet"):
        choice_graph(instance, {(): 2, ("t1",): 0}, good_shape)


def test_choice_graph_rejects_invalid_crucial():
    with pytest.raises(ValueError, match="not valid"):
        choice_graph(two_group_school(), {(): 2, ("t1",): 0})
