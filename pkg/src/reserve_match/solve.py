"""One-call solver entry points."""

from __future__ import annotations

from . import flow, graph
from .model import ChoiceResult, Instance

BACKENDS = ("flow", "graph")


def solve(instance: Instance, backend: str = "flow") -> ChoiceResult:
    """Run the balanced choice function with the requested backend."""
    if backend == "flow":
        return flow.choice_flow(instance)
    if backend == "graph":
        return graph.choice_graph(instance)
    raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
