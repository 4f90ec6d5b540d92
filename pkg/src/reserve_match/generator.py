"""Seeded pseudo-random instance generation.

The same (parameters, seed) pair always yields the same instance: students
are drawn first, then the priority shuffle, then the quotas, all from one
seeded generator. quota_style "uniform" scatters counts over every rank
below the top; "minmax" models minimum guarantees at rank 1 plus, when the
rank budget allows, maximum-style quotas at the next-to-last rank.
"""

from __future__ import annotations

import random
from typing import Optional

from .model import Instance, StudentRecord

QUOTA_STYLES = ("uniform", "minmax")


def generate_instance(
    num_students: int,
    num_types: int,
    num_ranks: int,
    seed: int,
    quota_style: str = "uniform",
    capacity: Optional[int] = None,
) -> Instance:
    """Build a reproducible instance from generation parameters."""
    if num_students < 0:
        raise ValueError("num_students must be non-negative")
    if num_types < 1:
        raise ValueError("num_types must be positive")
    if num_ranks < 1:
        raise ValueError("num_ranks must be positive")
    if quota_style not in QUOTA_STYLES:
        raise ValueError(f"unknown quota style {quota_style!r}")
    rng = random.Random(seed)
    types = [f"t{i + 1}" for i in range(num_types)]
    width = max(1, len(str(max(num_students - 1, 0))))
    students = [
        StudentRecord(
            f"s{i:0{width}d}",
            frozenset(t for t in types if rng.random() < 0.5),
        )
        for i in range(num_students)
    ]
    priority = [s.id for s in students]
    rng.shuffle(priority)
    if capacity is None:
        capacity = max(1, num_students // 2) if num_students else 0
    quotas = _draw_quotas(rng, types, num_ranks, capacity, quota_style)
    return Instance(
        students=students,
        capacity=capacity,
        priority=priority,
        types=types,
        quotas=quotas,
    )


def _draw_quotas(
    rng: random.Random,
    types: list[str],
    num_ranks: int,
    capacity: int,
    quota_style: str,
) -> dict[tuple[str, int], int]:
    quota_ranks = list(range(1, num_ranks))
    if not quota_ranks:
        return {}
    base = max(1, capacity // max(1, len(types) * len(quota_ranks)))
    quotas: dict[tuple[str, int], int] = {}
    if quota_style == "uniform":
        for t in types:
            for rank in quota_ranks:
                count = rng.randint(0, base)
                if count:
                    quotas[(t, rank)] = count
    else:
        for t in types:
            quotas[(t, 1)] = rng.randint(1, base)
        if num_ranks >= 3:
            for t in types:
                quotas[(t, num_ranks - 1)] = rng.randint(1, base)
    return quotas
