"""Axiom verifiers for selection outputs.

Checks a selected set against the four axioms: non-wastefulness, maximal
diversity, balanced representation and justified envy-freeness. Small
instances are judged against the enumeration oracle; larger ones fall back
to structural flow checks, and the report says which route ran.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from . import flow, oracle
from .model import (
    GroupKey,
    Instance,
    Ratio,
    group_counts,
    min_selection_ratio,
    selection_ratio,
    verify_non_wasteful,
)

MODE_ORACLE = "oracle"
MODE_STRUCTURAL = "structural"


@dataclass(frozen=True)
class AxiomReport:
    """Per-axiom verdicts for one selected set.

    mode records how the verdicts were obtained: "oracle" means exhaustive
    enumeration, "structural" means flow-based checks on instances too large
    for the oracle budget. envy_witness carries one offending pair
    (unselected, selected) when justified envy exists.
    """

    mode: str
    non_wasteful: bool
    maximal_diversity: bool
    balanced: bool
    justified_envy_free: bool
    alpha: Ratio
    envy_witness: Optional[tuple[str, str]] = None

    def all_hold(self) -> bool:
        return (
            self.non_wasteful
            and self.maximal_diversity
            and self.balanced
            and self.justified_envy_free
        )


def _min_ratio_of_vector(instance: Instance, counts: dict[GroupKey, int]) -> Ratio:
    groups = instance.groups()
    if not groups:
        return Fraction(0)
    return min(selection_ratio(counts[g.key], g.size) for g in groups)


def verify_balanced_and_jef(
    instance: Instance,
    selected: Iterable[str],
    oracle_budget: Optional[oracle.OracleBudget] = None,
) -> AxiomReport:
    """Verdicts for all four axioms on an arbitrary selected set.

    Justified envy is tested per definition: an unselected student s envies a
    selected, lower-priority s' when swapping them still yields a maximal
    diversity matching attaining the max-min ratio. Same-group swaps keep the
    counts and catch priority inversions inside a group.
    """
    chosen = frozenset(selected)
    counts = group_counts(instance, chosen)
    try:
        return _verify_by_oracle(instance, chosen, counts, oracle_budget)
    except oracle.OracleBudgetExceeded:
        return _verify_by_flow(instance, chosen, counts)


def _verify_by_oracle(
    instance: Instance,
    chosen: frozenset[str],
    counts: dict[GroupKey, int],
    budget: Optional[oracle.OracleBudget],
) -> AxiomReport:
    alpha, mset, _balanced_vectors = oracle.balanced_count_vectors(instance, budget)
    full = min(len(instance.students), instance.capacity)
    vector = tuple(counts[key] for key in mset.group_keys)
    maximal = len(chosen) == full and vector in mset.count_vectors
    balanced = maximal and _min_ratio_of_vector(instance, counts) == alpha

    index = {key: i for i, key in enumerate(mset.group_keys)}

    def swap_ok(out_key: GroupKey, in_key: GroupKey) -> bool:
        swapped = list(vector)
        swapped[index[in_key]] += 1
        swapped[index[out_key]] -= 1
        candidate = tuple(swapped)
        if candidate not in mset.count_vectors:
            return False
        as_dict = mset.counts_as_dict(candidate)
        return _min_ratio_of_vector(instance, as_dict) == alpha

    witness = None
    prio = instance.priority_index
    outsiders = [sid for sid in instance.priority if sid not in chosen]
    insiders = [sid for sid in reversed(instance.priority) if sid in chosen]
    for s in outsiders:
        for s_prime in insiders:
            if prio[s] >= prio[s_prime]:
                continue
            if swap_ok(instance.group_of(s_prime), instance.group_of(s)):
                witness = (s, s_prime)
                break
        if witness:
            break

    return AxiomReport(
        mode=MODE_ORACLE,
        non_wasteful=verify_non_wasteful(instance, chosen),
        maximal_diversity=maximal,
        balanced=balanced,
        justified_envy_free=witness is None,
        alpha=alpha,
        envy_witness=witness,
    )


def _verify_by_flow(
    instance: Instance, chosen: frozenset[str], counts: dict[GroupKey, int]
) -> AxiomReport:
    network = flow.build_network(instance)
    cert = flow.compute_certificate(network)
    alpha, _delta_star = flow.crucial_vector(instance, network=network, cert=cert)
    full = min(len(instance.students), instance.capacity)
    maximal = len(chosen) == full and (
        flow.check_validity_flow(instance, counts, network=network, cert=cert)
        is not None
    )
    balanced = maximal and min_selection_ratio(instance, chosen) == alpha

    def swap_ok(out_key: GroupKey, in_key: GroupKey) -> bool:
        swapped = dict(counts)
        swapped[in_key] += 1
        swapped[out_key] -= 1
        witness_matching = flow.check_validity_flow(
            instance, swapped, network=network, cert=cert
        )
        if witness_matching is None:
            return False
        return _min_ratio_of_vector(instance, swapped) == alpha

    # one extreme pair per ordered group pair decides justified envy: the top
    # unselected member of one group against the bottom selected member of
    # the other is the easiest pair to qualify
    prio = instance.priority_index
    candidates: list[tuple[int, int, str, str]] = []
    groups = instance.groups() if len(chosen) == full else ()
    for g_out in groups:
        bottom = next(
            (sid for sid in reversed(g_out.members) if sid in chosen), None
        )
        if bottom is None:
            continue
        for g_in in groups:
            top = next((sid for sid in g_in.members if sid not in chosen), None)
            if top is None or prio[top] >= prio[bottom]:
                continue
            if swap_ok(g_out.key, g_in.key):
                candidates.append((prio[top], -prio[bottom], top, bottom))
    witness = None
    if candidates:
        _, _, top, bottom = min(candidates)
        witness = (top, bottom)

    return AxiomReport(
        mode=MODE_STRUCTURAL,
        non_wasteful=verify_non_wasteful(instance, chosen),
        maximal_diversity=maximal,
        balanced=balanced,
        justified_envy_free=witness is None,
        alpha=alpha,
        envy_witness=witness,
    )
