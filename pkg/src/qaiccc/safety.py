"""Safe-pattern classification for a crosstalk rate against an allocation.

An ownership arrangement of a rate's qubits is safe when a trusted user
controls at least one impacting qubit, or when every user owning an
impacted qubit also controls at least one impacting qubit.  Spreading the
impacting qubits over several untrusted users is *not* safe on its own:
those users may collude or be the same actor.  An unallocated impacted
qubit always makes the pattern unsafe, because a future tenant placed
there would be an unprotected victim; an unallocated impacting qubit
merely adds a potential extra party.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .model import Allocation, CrosstalkRate, Trust


class SafetyReason(Enum):
    TRUSTED_CONTROLS_IMPACTING = "trusted-controls-impacting"
    ALL_IMPACTED_OWNERS_CONTROL_IMPACTING = "all-impacted-owners-control-impacting"
    UNALLOCATED_IMPACTED = "unallocated-impacted"
    IMPACTED_OWNER_WITHOUT_IMPACTING = "impacted-owner-without-impacting"


_SAFE_REASONS = frozenset(
    {SafetyReason.TRUSTED_CONTROLS_IMPACTING, SafetyReason.ALL_IMPACTED_OWNERS_CONTROL_IMPACTING}
)


@dataclass(frozen=True)
class SafetyVerdict:
    safe: bool
    reason: SafetyReason

    def __post_init__(self) -> None:
        if self.safe != (self.reason in _SAFE_REASONS):
            raise ValueError(f"verdict flag contradicts reason {self.reason}")


def is_safe(allocation: Allocation, rate: CrosstalkRate) -> SafetyVerdict:
    """Classify ``allocation`` against ``rate``.

    The verdict depends only on the owners of the rate's qubits; qubits
    outside ``rate.involved`` never flip it.
    """
    for comp in allocation.components_of(Trust.TRUSTED):
        if comp.qubits & rate.impacting:
            return SafetyVerdict(True, SafetyReason.TRUSTED_CONTROLS_IMPACTING)

    if rate.impacted & allocation.unallocated:
        return SafetyVerdict(False, SafetyReason.UNALLOCATED_IMPACTED)

    impacted_owners = {
        comp for comp in allocation.components if comp.qubits & rate.impacted
    }
    if all(comp.qubits & rate.impacting for comp in impacted_owners):
        return SafetyVerdict(True, SafetyReason.ALL_IMPACTED_OWNERS_CONTROL_IMPACTING)
    return SafetyVerdict(False, SafetyReason.IMPACTED_OWNER_WITHOUT_IMPACTING)


def involved_parties(allocation: Allocation, rate: CrosstalkRate) -> int:
    """Number of distinct parties holding the rate's qubits.

    Counts the components intersecting the involved set, plus one when
    any involved qubit is still unallocated: that qubit could later be
    handed to another user.
    """
    count = sum(1 for comp in allocation.components if comp.qubits & rate.involved)
    if rate.involved & allocation.unallocated:
        count += 1
    return count
