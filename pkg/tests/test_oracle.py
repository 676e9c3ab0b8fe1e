"""Exhaustive enumeration, replay checking, and the greedy baseline."""

from __future__ import annotations

import dataclasses

import pytest

from qaiccc import (
    Allocation,
    BaselineInfeasibleError,
    ConnectivityGraph,
    InstanceTooLargeError,
    SizeRequests,
    Trust,
    UserComponent,
    allocate,
    baseline_naive,
    canonicalize,
    enumerate_complete,
    oracle_report,
    replay_check,
    safe_prefix,
    sort_rates,
    validate_allocation,
)
from qaiccc.oracle import count_complete


def u(*qubits):
    return UserComponent(Trust.UNTRUSTED, frozenset(qubits))


def build(n, *components):
    used = frozenset().union(*(c.qubits for c in components)) if components else frozenset()
    return Allocation(unallocated=frozenset(range(n)) - used, components=components)


def key_of(*component_lists, n=5):
    return canonicalize(build(n, *(u(*qs) for qs in component_lists)))


class TestEnumerateComplete:
    def test_demo_partitions(self, demo_graph, demo_sizes):
        allocations = enumerate_complete(demo_graph, demo_sizes)
        got = {canonicalize(a) for a in allocations}
        assert key_of([0, 1], [2, 3, 4]) in got
        assert key_of([0, 1, 2], [3, 4]) in got
        # No partition may contain the disconnected pair {1,4}.
        for allocation in allocations:
            assert frozenset({1, 4}) not in {c.qubits for c in allocation.components}
            assert validate_allocation(allocation, demo_graph) == []
        assert len(got) == 2

    def test_path_graph_single_partition(self):
        path = ConnectivityGraph(3, frozenset({(0, 1), (1, 2)}))
        allocations = enumerate_complete(path, SizeRequests(untrusted=(3,)))
        assert [canonicalize(a) for a in allocations] == [key_of([0, 1, 2], n=3)]

    def test_cap_is_enforced(self):
        big = ConnectivityGraph(9, frozenset((i, i + 1) for i in range(8)))
        with pytest.raises(InstanceTooLargeError):
            enumerate_complete(big, SizeRequests(untrusted=(9,)))
        assert len(enumerate_complete(big, SizeRequests(untrusted=(9,)), cap=9)) == 1

    def test_count_self_consistency(self, demo_graph, demo_sizes, family):
        assert count_complete(demo_graph, demo_sizes) == len(
            enumerate_complete(demo_graph, demo_sizes)
        )
        for instance in family[:8]:
            assert count_complete(instance.graph, instance.sizes) == len(
                enumerate_complete(instance.graph, instance.sizes)
            )

    def test_equal_sizes_are_not_double_counted(self):
        square = ConnectivityGraph(4, frozenset({(0, 1), (1, 2), (2, 3), (0, 3)}))
        sizes = SizeRequests(untrusted=(2, 2))
        allocations = enumerate_complete(square, sizes)
        assert len(allocations) == count_complete(square, sizes) == 2


class TestSafePrefix:
    def test_selected_allocation_survives_two_rates(self, demo_rates):
        ordered = sort_rates(demo_rates)
        assert safe_prefix(build(5, u(0, 1), u(2, 3, 4)), ordered) == 2

    def test_attack_enabling_allocation_survives_none(self, demo_rates):
        ordered = sort_rates(demo_rates)
        assert safe_prefix(build(5, u(0, 1, 2), u(3, 4)), ordered) == 0

    def test_empty_rate_list_gives_zero(self):
        assert safe_prefix(build(5, u(0, 1), u(2, 3, 4)), ()) == 0


class TestReplayCheck:
    def test_every_search_output_replays_clean(self, demo_graph, demo_sizes, demo_rates):
        outcome = allocate(demo_graph, demo_sizes, demo_rates)
        for allocation in outcome.allocations:
            report = replay_check(allocation, outcome.rates)
            assert report.ok, report.mismatches

    def test_expected_penalties_match_the_narrative(self, demo_graph, demo_sizes, demo_rates):
        outcome = allocate(demo_graph, demo_sizes, demo_rates)
        by_key = {canonicalize(a): a for a in outcome.allocations}
        selected = by_key[key_of([0, 1], [2, 3, 4])]
        report = replay_check(selected, outcome.rates)
        assert report.ok
        assert report.expected_penalty == 0.0
        assert report.expected_incidental == ()
        assert report.expected_last_rate == demo_rates[2]
        partial = by_key[key_of([0, 1], [2, 3])]
        assert replay_check(partial, outcome.rates).expected_penalty == 0.0027

    def test_tampered_penalty_is_flagged(self, demo_graph, demo_sizes, demo_rates):
        outcome = allocate(demo_graph, demo_sizes, demo_rates)
        victim = outcome.allocations[1]
        tampered = dataclasses.replace(victim, penalty=victim.penalty + 1.0)
        report = replay_check(tampered, outcome.rates)
        assert not report.ok
        assert any("penalty" in m for m in report.mismatches)


class TestBaselineNaive:
    def test_request_order_drives_the_greedy_fill(self, demo_graph):
        allocation = baseline_naive(demo_graph, SizeRequests(untrusted=(3, 2)))
        assert canonicalize(allocation) == key_of([0, 1, 2], [3, 4])

    def test_single_full_request_takes_everything(self, demo_graph):
        allocation = baseline_naive(demo_graph, SizeRequests(untrusted=(5,)))
        assert canonicalize(allocation) == key_of([0, 1, 2, 3, 4])

    def test_idle_request_is_filled_too(self, demo_graph):
        allocation = baseline_naive(demo_graph, SizeRequests(untrusted=(2,)))
        assert canonicalize(allocation) == key_of([0, 1], [2, 3, 4])
        assert allocation.unallocated == frozenset()

    def test_stuck_greedy_raises(self):
        two_cliques = ConnectivityGraph(4, frozenset({(0, 1), (2, 3)}))
        with pytest.raises(BaselineInfeasibleError):
            baseline_naive(two_cliques, SizeRequests(untrusted=(3, 1)))


class TestOracleReport:
    def test_demo_instance_has_gap_zero(self, demo_graph, demo_sizes, demo_rates):
        report = oracle_report(demo_graph, demo_sizes, demo_rates)
        assert report.optimum_safe_prefix == 2
        assert report.algorithm_safe_prefix == 2
        assert report.gap == 0
        assert report.optimum_allocations == (key_of([0, 1], [2, 3, 4]),)

    def test_zero_rates_make_every_partition_optimal(self, demo_graph, demo_sizes):
        report = oracle_report(demo_graph, demo_sizes, [])
        assert report.optimum_safe_prefix == 0
        assert report.gap == 0
        assert len(report.optimum_allocations) == report.complete_count
