"""Loading and saving platforms, size requests, and crosstalk rates.

All files are UTF-8 JSON:

* platform: ``{"qubits": N, "edges": [[a, b], ...]}``
* requests: ``{"trusted": [sizes...], "untrusted": [sizes...]}``
* rates: a JSON array of records, each with integer arrays ``impacting``
  and ``impacted`` plus either a precomputed ``score`` or the pair
  ``stochastic`` + ``hamiltonian`` whose sum is the composite score.

Rates keep their file order here; sorting in decreasing score order is
the allocator's job.  A deterministic synthetic generator stands in for
the physical crosstalk measurement so the allocator can be exercised
without lab data.
"""

from __future__ import annotations

import itertools
import json
import random
from pathlib import Path
from typing import Iterable

from .completion import connected_subsets
from .errors import InputFileError
from .model import ConnectivityGraph, CrosstalkRate, SizeRequests

_RATE_SHAPES = ((1, 1), (2, 1), (2, 2))
_SCORE_RANGE = (1e-4, 1e-2)


def composite_score(stochastic: float, hamiltonian: float) -> float:
    """Composite error rate: the sum of the stochastic and hamiltonian rates."""
    if stochastic < 0 or hamiltonian < 0:
        raise ValueError("error rates must be non-negative")
    return stochastic + hamiltonian


def _read_json(path: str | Path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputFileError(str(exc), path=str(path)) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputFileError(f"invalid JSON: {exc}", path=str(path)) from exc


def load_platform(path: str | Path) -> ConnectivityGraph:
    data = _read_json(path)
    if not isinstance(data, dict) or "qubits" not in data:
        raise InputFileError("platform file must be an object with 'qubits'", path=str(path))
    qubits = data["qubits"]
    edges = data.get("edges", [])
    if not isinstance(qubits, int) or isinstance(qubits, bool):
        raise InputFileError("'qubits' must be an integer", path=str(path))
    if not isinstance(edges, list):
        raise InputFileError("'edges' must be a list of pairs", path=str(path))
    pairs = set()
    for i, edge in enumerate(edges):
        if (
            not isinstance(edge, list)
            or len(edge) != 2
            or not all(isinstance(q, int) and not isinstance(q, bool) for q in edge)
        ):
            raise InputFileError(f"edge {i} must be a pair of integers", path=str(path))
        pairs.add((edge[0], edge[1]))
    try:
        return ConnectivityGraph(qubits, frozenset(pairs))
    except ValueError as exc:
        raise InputFileError(str(exc), path=str(path)) from exc


def save_platform(graph: ConnectivityGraph, path: str | Path) -> None:
    payload = {"qubits": graph.vertex_count, "edges": [list(e) for e in sorted(graph.edges)]}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def _size_list(data: dict, key: str, path: str | Path) -> tuple[int, ...]:
    values = data.get(key, [])
    if not isinstance(values, list) or not all(
        isinstance(v, int) and not isinstance(v, bool) for v in values
    ):
        raise InputFileError(f"'{key}' must be a list of integers", path=str(path))
    return tuple(values)


def load_requests(path: str | Path) -> SizeRequests:
    data = _read_json(path)
    if not isinstance(data, dict):
        raise InputFileError("requests file must be an object", path=str(path))
    try:
        return SizeRequests(
            trusted=_size_list(data, "trusted", path),
            untrusted=_size_list(data, "untrusted", path),
        )
    except ValueError as exc:
        raise InputFileError(str(exc), path=str(path)) from exc


def save_requests(sizes: SizeRequests, path: str | Path) -> None:
    payload = {"trusted": list(sizes.trusted), "untrusted": list(sizes.untrusted)}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def _qubit_group(record: dict, key: str, graph: ConnectivityGraph, index: int, path) -> frozenset[int]:
    values = record.get(key)
    if not isinstance(values, list) or not all(
        isinstance(q, int) and not isinstance(q, bool) for q in values
    ):
        raise InputFileError(f"'{key}' must be a list of integers", path=path, record=index)
    group = frozenset(values)
    if len(group) != len(values):
        raise InputFileError(f"'{key}' repeats a qubit", path=path, record=index)
    invalid = [q for q in group if not 0 <= q < graph.vertex_count]
    if invalid:
        raise InputFileError(
            f"'{key}' names unknown qubits {sorted(invalid)}", path=path, record=index
        )
    return group


def _resolve_score(record: dict, index: int, path) -> float:
    has_score = "score" in record
    has_parts = "stochastic" in record or "hamiltonian" in record
    if has_score and has_parts:
        raise InputFileError(
            "give either 'score' or 'stochastic'+'hamiltonian', not both", path=path, record=index
        )
    if has_score:
        score = record["score"]
        if not isinstance(score, (int, float)) or isinstance(score, bool) or score < 0:
            raise InputFileError("'score' must be a non-negative number", path=path, record=index)
        return float(score)
    if "stochastic" not in record or "hamiltonian" not in record:
        raise InputFileError(
            "record needs 'score' or both 'stochastic' and 'hamiltonian'", path=path, record=index
        )
    parts = (record["stochastic"], record["hamiltonian"])
    if not all(isinstance(p, (int, float)) and not isinstance(p, bool) and p >= 0 for p in parts):
        raise InputFileError(
            "'stochastic' and 'hamiltonian' must be non-negative numbers", path=path, record=index
        )
    return composite_score(float(parts[0]), float(parts[1]))


def load_rates(path: str | Path, graph: ConnectivityGraph) -> tuple[CrosstalkRate, ...]:
    """Parse a rates file against ``graph``, preserving file order.

    Every record is validated: known qubits, a supported shape, a
    connected qubit group, a resolvable score, and no duplicate
    (impacting, impacted) pair.  Errors carry the record index.
    """
    data = _read_json(path)
    if not isinstance(data, list):
        raise InputFileError("rates file must be a JSON array of records", path=str(path))
    rates: list[CrosstalkRate] = []
    seen_pairs: dict[tuple, int] = {}
    for index, record in enumerate(data):
        if not isinstance(record, dict):
            raise InputFileError("record must be an object", path=str(path), record=index)
        impacting = _qubit_group(record, "impacting", graph, index, str(path))
        impacted = _qubit_group(record, "impacted", graph, index, str(path))
        score = _resolve_score(record, index, str(path))
        try:
            rate = CrosstalkRate(score, impacting, impacted)
        except ValueError as exc:
            raise InputFileError(str(exc), path=str(path), record=index) from exc
        if not graph.is_connected(rate.involved):
            raise InputFileError(
                f"qubit group {sorted(rate.involved)} is not connected on the platform",
                path=str(path),
                record=index,
            )
        pair = (tuple(sorted(impacting)), tuple(sorted(impacted)))
        if pair in seen_pairs:
            raise InputFileError(
                f"duplicate of record {seen_pairs[pair]} (same impacting/impacted pair)",
                path=str(path),
                record=index,
            )
        seen_pairs[pair] = index
        rates.append(rate)
    return tuple(rates)


def rate_to_record(rate: CrosstalkRate) -> dict:
    return {
        "score": rate.score,
        "impacting": sorted(rate.impacting),
        "impacted": sorted(rate.impacted),
    }


def save_rates(rates: Iterable[CrosstalkRate], path: str | Path) -> None:
    payload = [rate_to_record(rate) for rate in rates]
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def synth_rates(
    graph: ConnectivityGraph, seed: int, max_rates: int | None = None
) -> tuple[CrosstalkRate, ...]:
    """Deterministic synthetic rate list for a platform.

    Emits one rate per connected qubit group per shape (1-to-1 over pairs,
    2-to-1 over triples, 2-to-2 over quadruples), with the split between
    impacting and impacted qubits and the score drawn from a seeded
    stream.  Identical ``(graph, seed)`` always yields the identical list.
    """
    rng = random.Random(seed)
    rates: list[CrosstalkRate] = []
    for impacting_count, impacted_count in _RATE_SHAPES:
        group_size = impacting_count + impacted_count
        groups = sorted(
            tuple(sorted(group))
            for group in connected_subsets(graph.qubits, group_size, graph)
        )
        for group in groups:
            if max_rates is not None and len(rates) >= max_rates:
                return tuple(rates)
            splits = [
                (frozenset(combo), frozenset(group) - frozenset(combo))
                for combo in itertools.combinations(group, impacting_count)
            ]
            impacting, impacted = rng.choice(splits)
            score = rng.uniform(*_SCORE_RANGE)
            rates.append(CrosstalkRate(score, impacting, impacted))
    if max_rates is not None:
        return tuple(rates[:max_rates])
    return tuple(rates)
