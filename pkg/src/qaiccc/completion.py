"""Exact-size completion of partial allocations.

Every user's qubits must form a connected component of exactly the
requested size, and after the idle request is in place the request sizes
sum to the platform size, so a completed allocation covers every qubit.
Completion searches deterministically: request slots in declared order
(trusted, then untrusted, idle last), existing components before fresh
ones, and qubits in ascending index.  The search backtracks over every
binding and growth choice, so failure means no completion exists.
"""

from __future__ import annotations

from typing import Iterator

from .model import Allocation, ConnectivityGraph, SizeRequests, Trust, UserComponent
from .sizing import assignment_feasible

#: ("trusted" | "untrusted" | "idle", position within its class)
RequestLabel = tuple[str, int]


def request_slots(sizes: SizeRequests) -> tuple[tuple[RequestLabel, Trust, int], ...]:
    """Positional request list; the idle request, when present, comes last."""
    slots: list[tuple[RequestLabel, Trust, int]] = []
    slots += [(("trusted", i), Trust.TRUSTED, s) for i, s in enumerate(sizes.trusted)]
    slots += [(("untrusted", i), Trust.UNTRUSTED, s) for i, s in enumerate(sizes.untrusted)]
    if sizes.idle_size is not None:
        slots.append((("idle", 0), Trust.UNTRUSTED, sizes.idle_size))
    return tuple(slots)


def _connected_supersets(
    base: frozenset[int], target: int, available: frozenset[int], graph: ConnectivityGraph
) -> Iterator[frozenset[int]]:
    """All connected supersets of ``base`` of size ``target`` inside base+available.

    Classic include/exclude enumeration on the minimum frontier vertex:
    each superset is produced exactly once, in a deterministic order.
    ``base`` must itself be connected and no larger than ``target``.
    """

    def rec(current: frozenset[int], allowed: frozenset[int]) -> Iterator[frozenset[int]]:
        if len(current) == target:
            yield current
            return
        if len(current) + len(allowed) < target:
            return
        frontier = [q for q in allowed if any(n in current for n in graph.neighbors(q))]
        if not frontier:
            return
        pick = min(frontier)
        yield from rec(current | {pick}, allowed - {pick})
        yield from rec(current, allowed - {pick})

    if len(base) > target or not graph.is_connected(base):
        return
    yield from rec(base, available - base)


def connected_subsets(
    available: frozenset[int], size: int, graph: ConnectivityGraph
) -> Iterator[frozenset[int]]:
    """All connected ``size``-subsets of ``available``, each exactly once."""
    for anchor in sorted(available):
        allowed = frozenset(q for q in available if q > anchor)
        yield from _connected_supersets(frozenset({anchor}), size, allowed, graph)


def complete_allocation(
    allocation: Allocation, graph: ConnectivityGraph, sizes: SizeRequests
) -> tuple[Allocation, dict[RequestLabel, frozenset[int]]] | None:
    """Grow ``allocation`` so every request gets a connected component of its exact size.

    Returns the completed allocation (attributes carried over) and the
    request-to-qubits assignment, or None when no completion exists.
    Completion requires the request sizes to sum to the platform size,
    i.e. ``sizes`` after the idle request has been added.
    """
    slots = request_slots(sizes)
    if sum(size for _, _, size in slots) != graph.vertex_count:
        return None

    comps = list(allocation.components)

    def class_feasible(slot_index: int, used: list[bool]) -> bool:
        for trust in (Trust.TRUSTED, Trust.UNTRUSTED):
            pending = [len(c.qubits) for i, c in enumerate(comps) if not used[i] and c.trust is trust]
            open_slots = [size for _, t, size in slots[slot_index:] if t is trust]
            if not assignment_feasible(pending, open_slots):
                return False
        return True

    def search(
        slot_index: int, unallocated: frozenset[int], used: list[bool]
    ) -> list[frozenset[int]] | None:
        if slot_index == len(slots):
            if unallocated or not all(used):
                return None
            return []
        if not class_feasible(slot_index, used):
            return None
        _, trust, size = slots[slot_index]

        for i, comp in enumerate(comps):
            if used[i] or comp.trust is not trust or len(comp.qubits) > size:
                continue
            used[i] = True
            for grown in _connected_supersets(comp.qubits, size, unallocated, graph):
                rest = search(slot_index + 1, unallocated - grown, used)
                if rest is not None:
                    used[i] = False
                    return [grown] + rest
            used[i] = False

        for fresh in connected_subsets(unallocated, size, graph):
            rest = search(slot_index + 1, unallocated - fresh, used)
            if rest is not None:
                return [fresh] + rest
        return None

    chosen = search(0, allocation.unallocated, [False] * len(comps))
    if chosen is None:
        return None

    assignment = {label: qubits for (label, _, _), qubits in zip(slots, chosen)}
    completed = Allocation(
        unallocated=frozenset(),
        components=tuple(
            UserComponent(trust, qubits) for (_, trust, _), qubits in zip(slots, chosen)
        ),
        score=allocation.score,
        penalty=allocation.penalty,
        incidental=allocation.incidental,
        last_rate=allocation.last_rate,
    )
    return completed, assignment


def can_complete(allocation: Allocation, graph: ConnectivityGraph, sizes: SizeRequests) -> bool:
    """True when :func:`complete_allocation` would succeed."""
    return complete_allocation(allocation, graph, sizes) is not None
