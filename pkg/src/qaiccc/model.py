"""Domain types for crosstalk-aware qubit allocation.

Qubits are plain non-negative integers indexing vertices of the platform
connectivity graph.  All types here are immutable values: the search in
:mod:`qaiccc.allocator` never mutates an allocation, it derives new ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Sequence


class Trust(str, Enum):
    """Trust class of a user request or of an allocated component."""

    TRUSTED = "trusted"
    UNTRUSTED = "untrusted"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


@dataclass(frozen=True)
class ConnectivityGraph:
    """Undirected coupling map of the platform.

    ``edges`` holds normalized pairs ``(a, b)`` with ``a < b``; self loops
    and out-of-range endpoints are rejected at construction.
    """

    vertex_count: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if self.vertex_count <= 0:
            raise ValueError("vertex_count must be positive")
        normalized = set()
        for edge in self.edges:
            a, b = edge
            if a == b:
                raise ValueError(f"self loop on qubit {a}")
            if not (0 <= a < self.vertex_count and 0 <= b < self.vertex_count):
                raise ValueError(f"edge {edge} has an endpoint outside 0..{self.vertex_count - 1}")
            normalized.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", frozenset(normalized))

    @cached_property
    def _adjacency(self) -> dict[int, tuple[int, ...]]:
        nbrs: dict[int, list[int]] = {q: [] for q in range(self.vertex_count)}
        for a, b in self.edges:
            nbrs[a].append(b)
            nbrs[b].append(a)
        return {q: tuple(sorted(v)) for q, v in nbrs.items()}

    @property
    def qubits(self) -> frozenset[int]:
        return frozenset(range(self.vertex_count))

    def neighbors(self, qubit: int) -> tuple[int, ...]:
        return self._adjacency[qubit]

    def is_connected(self, qubits: Iterable[int]) -> bool:
        """True when ``qubits`` induces a connected subgraph (or is empty)."""
        group = set(qubits)
        if not group:
            return True
        seen = set()
        stack = [min(group)]
        while stack:
            q = stack.pop()
            if q in seen:
                continue
            seen.add(q)
            stack.extend(n for n in self._adjacency[q] if n in group and n not in seen)
        return seen == group


@dataclass(frozen=True)
class CrosstalkRate:
    """One crosstalk measurement: ``impacting`` qubits perturb ``impacted`` ones.

    The composite ``score`` is dimensionless and non-negative.  Only the
    1-to-1, 2-to-1, and 2-to-2 shapes occur; the union of the two qubit
    groups must additionally induce a connected subgraph of the platform,
    which is checked where a graph is in scope (see :mod:`qaiccc.ingest`).
    """

    score: float
    impacting: frozenset[int]
    impacted: frozenset[int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "impacting", frozenset(self.impacting))
        object.__setattr__(self, "impacted", frozenset(self.impacted))
        if self.score < 0:
            raise ValueError("rate score must be non-negative")
        shape = (len(self.impacting), len(self.impacted))
        if shape not in {(1, 1), (2, 1), (2, 2)}:
            raise ValueError(f"unsupported crosstalk shape {shape}")
        if self.impacting & self.impacted:
            raise ValueError("impacting and impacted sets overlap")

    @property
    def involved(self) -> frozenset[int]:
        return self.impacting | self.impacted

    def sort_key(self) -> tuple:
        """Descending-score processing order with a deterministic tie-break."""
        return (-self.score, tuple(sorted(self.impacting)), tuple(sorted(self.impacted)))


@dataclass(frozen=True)
class UserComponent:
    """Qubits held by one user, tagged with the user's trust class."""

    trust: Trust
    qubits: frozenset[int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "qubits", frozenset(self.qubits))
        if not self.qubits:
            raise ValueError("a user component cannot be empty")

    def sort_key(self) -> tuple:
        return (self.trust.value, tuple(sorted(self.qubits)))


@dataclass(frozen=True)
class SizeRequests:
    """Requested circuit sizes per trust class.

    Requests are ordered multisets: two users may ask for equal sizes.
    ``idle_size``, when set, is the synthetic untrusted request absorbing
    the otherwise unused qubits (see :func:`qaiccc.allocator.update_sizes`).
    """

    trusted: tuple[int, ...] = ()
    untrusted: tuple[int, ...] = ()
    idle_size: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "trusted", tuple(self.trusted))
        object.__setattr__(self, "untrusted", tuple(self.untrusted))
        for size in (*self.trusted, *self.untrusted):
            if size <= 0:
                raise ValueError("request sizes must be positive")
        if self.idle_size is not None and self.idle_size <= 0:
            raise ValueError("idle size must be positive")

    def for_trust(self, trust: Trust) -> tuple[int, ...]:
        """Request sizes of one class; the idle request counts as untrusted."""
        if trust is Trust.TRUSTED:
            return self.trusted
        if self.idle_size is None:
            return self.untrusted
        return self.untrusted + (self.idle_size,)

    def total(self) -> int:
        return sum(self.for_trust(Trust.TRUSTED)) + sum(self.for_trust(Trust.UNTRUSTED))


#: Attribute-free normal form of an allocation: the sorted unallocated
#: qubits plus the components as (trust value, sorted qubits) pairs in
#: canonical order.  Two allocations share a key iff their structure is
#: identical.
CanonicalKey = tuple


@dataclass(frozen=True)
class Allocation:
    """A (possibly partial) assignment of platform qubits to users.

    ``components`` is stored in canonical order so equality-of-structure
    is positional.  The search attributes (``score``, ``penalty``,
    ``incidental``, ``last_rate``) ride along but never enter the
    canonical key.
    """

    unallocated: frozenset[int]
    components: tuple[UserComponent, ...] = ()
    score: float = 0.0
    penalty: float = 0.0
    incidental: tuple[CrosstalkRate, ...] = ()
    last_rate: CrosstalkRate | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "unallocated", frozenset(self.unallocated))
        ordered = tuple(sorted(self.components, key=UserComponent.sort_key))
        object.__setattr__(self, "components", ordered)
        object.__setattr__(self, "incidental", tuple(self.incidental))

    def owner_of(self, qubit: int) -> UserComponent | None:
        for comp in self.components:
            if qubit in comp.qubits:
                return comp
        return None

    def components_of(self, trust: Trust) -> tuple[UserComponent, ...]:
        return tuple(c for c in self.components if c.trust is trust)

    def allocated(self) -> frozenset[int]:
        out: set[int] = set()
        for comp in self.components:
            out |= comp.qubits
        return frozenset(out)

def canonicalize(allocation: Allocation) -> CanonicalKey:
    """Total-order normal form of an allocation's structure.

    Attributes are excluded by construction: perturbing score, penalty,
    incidental, or last_rate never changes the key.
    """
    return (
        tuple(sorted(allocation.unallocated)),
        tuple((c.trust.value, tuple(sorted(c.qubits))) for c in allocation.components),
    )


def dedup_allocations(allocations: Iterable[Allocation]) -> list[Allocation]:
    """Drop structural duplicates, keeping the first occurrence of each key."""
    seen: set[CanonicalKey] = set()
    out: list[Allocation] = []
    for alloc in allocations:
        key = canonicalize(alloc)
        if key not in seen:
            seen.add(key)
            out.append(alloc)
    return out


def validate_allocation(allocation: Allocation, graph: ConnectivityGraph) -> list[str]:
    """Structural diagnostics: disjointness, coverage, and connectivity.

    Returns one message per violated invariant; an empty list means the
    allocation is structurally valid for ``graph``.
    """
    violations: list[str] = []
    all_qubits = graph.qubits

    groups: list[tuple[str, frozenset[int]]] = [("unallocated", allocation.unallocated)]
    groups += [(f"component {sorted(c.qubits)}", c.qubits) for c in allocation.components]

    for name, qubits in groups:
        stray = qubits - all_qubits
        if stray:
            violations.append(f"{name} uses unknown qubits {sorted(stray)}")

    covered: set[int] = set()
    for name, qubits in groups:
        overlap = covered & qubits
        if overlap:
            violations.append(f"{name} overlaps earlier groups on {sorted(overlap)}")
        covered |= qubits
    if covered != set(all_qubits):
        missing = set(all_qubits) - covered
        if missing:
            violations.append(f"qubits {sorted(missing)} are neither allocated nor unallocated")

    for comp in allocation.components:
        if not graph.is_connected(comp.qubits):
            violations.append(f"component {sorted(comp.qubits)} is not connected")

    return violations


def sort_rates(rates: Sequence[CrosstalkRate]) -> tuple[CrosstalkRate, ...]:
    """Processing order: decreasing score, ties by qubit-set lexicographic order."""
    return tuple(sorted(rates, key=CrosstalkRate.sort_key))
