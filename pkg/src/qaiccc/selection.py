"""Ranking and final selection of an allocation, plus the noise worklist.

The search's output is sorted by increasing score (then penalty), so the
allocations that survived the most rates come first and the initial
all-unallocated allocation comes last.  Each candidate in turn is grown
to exact request sizes; the first one that completes wins.  Completion
feasibility stands in for transpilation success: connected components of
the right sizes can be realized with swap gates.

The worklist handed to downstream noise-reduction starts with the
selected allocation's recorded incidental rates and continues with the
sorted rate list from its ``last_rate`` onward, i.e. everything the
allocation does not protect against by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .allocator import update_sizes
from .completion import RequestLabel, complete_allocation
from .errors import CompletionInfeasibleError, NoFeasibleAllocationError
from .model import (
    Allocation,
    ConnectivityGraph,
    CrosstalkRate,
    SizeRequests,
    canonicalize,
    sort_rates,
)


@dataclass(frozen=True)
class SelectionResult:
    """The chosen complete allocation with its request binding and worklist."""

    allocation: Allocation
    assignment: Mapping[RequestLabel, frozenset[int]]
    worklist: tuple[CrosstalkRate, ...]


def rank(results: Iterable[Allocation]) -> list[Allocation]:
    """Ascending score, then penalty, then canonical key; fully deterministic."""
    return sorted(results, key=lambda a: (a.score, a.penalty, canonicalize(a)))


def complete(
    allocation: Allocation, graph: ConnectivityGraph, sizes: SizeRequests
) -> tuple[Allocation, dict[RequestLabel, frozenset[int]]]:
    """Grow ``allocation`` to exact request sizes or raise.

    Raises :class:`CompletionInfeasibleError` when no exact-size binding
    with connected components exists.
    """
    result = complete_allocation(allocation, graph, sizes)
    if result is None:
        raise CompletionInfeasibleError(
            "allocation cannot be grown to the requested circuit sizes"
        )
    return result


def noise_worklist(
    selected: Allocation, rates: Sequence[CrosstalkRate]
) -> tuple[CrosstalkRate, ...]:
    """Rates left for downstream reduction, most urgent first.

    ``rates`` must be the allocator's sorted order.  The result is the
    selected allocation's incidental list followed by the suffix of
    ``rates`` starting at its ``last_rate`` (empty when unset), with
    duplicates dropped keeping the first occurrence.
    """
    ordered = list(rates)
    if ordered != list(sort_rates(ordered)):
        raise ValueError("rates must be sorted in the allocator's processing order")
    sequence: list[CrosstalkRate] = list(selected.incidental)
    if selected.last_rate is not None:
        try:
            start = ordered.index(selected.last_rate)
        except ValueError:
            raise ValueError("last_rate does not appear in the rate list") from None
        sequence += ordered[start:]
    out: list[CrosstalkRate] = []
    seen: set[CrosstalkRate] = set()
    for rate in sequence:
        if rate not in seen:
            seen.add(rate)
            out.append(rate)
    return tuple(out)


def select(
    results: Iterable[Allocation],
    graph: ConnectivityGraph,
    sizes: SizeRequests,
    rates: Sequence[CrosstalkRate],
) -> SelectionResult:
    """Walk the ranked allocations and return the first that completes.

    Raises :class:`NoFeasibleAllocationError` when every candidate fails,
    i.e. the platform cannot host the requested circuit sizes at all.
    """
    full = update_sizes(graph.vertex_count, sizes)
    ordered = sort_rates(rates)
    for candidate in rank(results):
        completed = complete_allocation(candidate, graph, full)
        if completed is None:
            continue
        allocation, assignment = completed
        return SelectionResult(
            allocation=allocation,
            assignment=assignment,
            worklist=noise_worklist(candidate, ordered),
        )
    raise NoFeasibleAllocationError(
        "no allocation could be completed to the requested circuit sizes"
    )
