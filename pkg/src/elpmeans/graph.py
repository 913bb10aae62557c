"""Graph container, edge-list / label parsing and a planted-partition generator."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, DataError, ParseError


@dataclass(frozen=True)
class Graph:
    """Undirected, weighted simple graph with contiguous integer node ids.

    ``adjacency[i]`` holds ``(neighbor, weight)`` pairs sorted by neighbor id.
    Instances are immutable; build them with :meth:`from_edges` or
    :func:`parse_edge_list`.
    """

    node_names: tuple[str, ...]
    adjacency: tuple[tuple[tuple[int, float], ...], ...]

    @classmethod
    def from_edges(cls, node_names: Sequence[str], edges: Iterable[tuple[int, int, float]]) -> "Graph":
        names = tuple(str(n) for n in node_names)
        if len(set(names)) != len(names):
            raise DataError("node names must be unique")
        n = len(names)
        nbrs: list[dict[int, float]] = [{} for _ in range(n)]
        for u, v, w in edges:
            u, v, w = int(u), int(v), float(w)
            if not (0 <= u < n and 0 <= v < n):
                raise DataError(f"edge ({u}, {v}) references a node outside 0..{n - 1}")
            if u == v:
                raise DataError(f"self-loop on node {names[u]!r}")
            if not (w > 0 and math.isfinite(w)):
                raise DataError(f"edge ({u}, {v}) has non-positive or non-finite weight {w}")
            nbrs[u][v] = w
            nbrs[v][u] = w
        adjacency = tuple(tuple(sorted(d.items())) for d in nbrs)
        return cls(names, adjacency)

    @property
    def node_count(self) -> int:
        return len(self.node_names)

    @cached_property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    @cached_property
    def index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.node_names)}

    def degree(self, node: int) -> int:
        return len(self.adjacency[node])

    def edges(self) -> list[tuple[int, int, float]]:
        """Each undirected edge once, as ``(u, v, w)`` with ``u < v``."""
        return [(u, v, w) for u, nb in enumerate(self.adjacency) for v, w in nb if u < v]

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(indptr, indices, weights)`` arrays of the adjacency structure."""
        indptr = np.zeros(self.node_count + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(a) for a in self.adjacency])
        indices = np.fromiter((v for a in self.adjacency for v, _ in a), dtype=np.int64, count=int(indptr[-1]))
        weights = np.fromiter((w for a in self.adjacency for _, w in a), dtype=np.float64, count=int(indptr[-1]))
        return indptr, indices, weights

    def to_edge_list_text(self) -> str:
        """Serialize as ``u v w`` lines that re-parse to an identical graph.

        Lines are ordered so that first-seen order reproduces the internal
        ids whenever that is possible, which always holds for graphs that
        came out of :func:`parse_edge_list`.
        """
        names = self.node_names
        lines = [f"{names[u]} {names[v]} {w!r}" for u, v, w in _first_seen_order(self)]
        return "".join(line + "\n" for line in lines)


def _first_seen_order(graph: Graph) -> list[tuple[int, int, float]]:
    n = graph.node_count
    remaining = {(u, v): w for u, v, w in graph.edges()}
    seen = 0  # nodes 0..seen-1 have been introduced
    out: list[tuple[int, int, float]] = []

    def flush_internal():
        for (u, v) in sorted(remaining):
            if v < seen:
                out.append((u, v, remaining.pop((u, v))))

    while remaining:
        flush_internal()
        if not remaining:
            break
        t = seen
        while t < n and not graph.adjacency[t]:
            t += 1  # isolated nodes cannot appear in an edge list
        if t != seen:
            break
        partner = next((v for v, _ in graph.adjacency[t] if v < t), None)
        if partner is not None:
            out.append((partner, t, remaining.pop((partner, t))))
            seen = t + 1
        elif (t, t + 1) in remaining:
            out.append((t, t + 1, remaining.pop((t, t + 1))))
            seen = t + 2
        else:
            break
    # ids not reproducible from edges alone; fall back to a sorted dump
    out.extend((u, v, remaining[(u, v)]) for (u, v) in sorted(remaining))
    return out


def _lines(text) -> Iterable[tuple[int, str]]:
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    if isinstance(text, str):
        text = io.StringIO(text)
    for lineno, raw in enumerate(text, start=1):
        line = raw.rstrip("\r\n")
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, line


def parse_edge_list(text) -> Graph:
    """Parse ``u v`` / ``u v w`` lines into a :class:`Graph`.

    ``text`` may be a string or any iterable of lines (e.g. an open file).
    Node ids are assigned in first-seen order; a repeated pair keeps the
    weight of its last occurrence.
    """
    index: dict[str, int] = {}
    edges: dict[tuple[int, int], float] = {}
    for lineno, line in _lines(text):
        tokens = line.split()
        if len(tokens) not in (2, 3):
            raise ParseError(f"expected 'u v' or 'u v w', got {len(tokens)} tokens", lineno)
        a, b = tokens[0], tokens[1]
        if a == b:
            raise ParseError(f"self-loop on node {a!r}", lineno)
        w = 1.0
        if len(tokens) == 3:
            try:
                w = float(tokens[2])
            except ValueError:
                raise ParseError(f"non-numeric weight {tokens[2]!r}", lineno) from None
            if not (w > 0 and math.isfinite(w)):
                raise ParseError(f"weight must be positive and finite, got {tokens[2]!r}", lineno)
        u = index.setdefault(a, len(index))
        v = index.setdefault(b, len(index))
        edges[(min(u, v), max(u, v))] = w
    return Graph.from_edges(list(index), ((u, v, w) for (u, v), w in edges.items()))


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """Community label per node, mapped to contiguous ids ``0..C-1``.

    Ids follow the order in which labels first occur when walking nodes by
    internal id; ``label_names[c]`` recovers the original string.
    """

    labels: np.ndarray
    label_names: tuple[str, ...]

    @property
    def community_count(self) -> int:
        return len(self.label_names)

    @classmethod
    def from_labels(cls, raw: Sequence) -> "GroundTruth":
        mapping: dict[str, int] = {}
        ids = [mapping.setdefault(str(x), len(mapping)) for x in raw]
        labels = np.asarray(ids, dtype=np.int64)
        labels.setflags(write=False)
        return cls(labels, tuple(mapping))


def parse_labels(text, graph: Graph) -> GroundTruth:
    """Parse ``name<TAB>label`` lines covering every node of ``graph``."""
    found: dict[int, str] = {}
    index = graph.index
    for lineno, line in _lines(text):
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise ParseError("expected 'name<TAB>label'", lineno)
        name, label = parts[0].strip(), parts[1].strip()
        if name not in index:
            raise DataError(f"line {lineno}: unknown node {name!r}")
        node = index[name]
        if node in found and found[node] != label:
            raise DataError(f"line {lineno}: node {name!r} has conflicting labels {found[node]!r} and {label!r}")
        found[node] = label
    missing = [graph.node_names[i] for i in range(graph.node_count) if i not in found]
    if missing:
        raise DataError(f"no label for node(s): {', '.join(repr(m) for m in missing[:10])}")
    return GroundTruth.from_labels([found[i] for i in range(graph.node_count)])


def generate_planted_partition(blocks: int, block_size: int, p_in: float, p_out: float, seed: int):
    """Sample a planted-partition graph and its block ground truth.

    Pairs are visited in row-major upper-triangle order and each gets one
    uniform draw from ``numpy.random.default_rng(seed)``. Node ``i`` is
    named ``str(i)`` and belongs to block ``i // block_size``.
    """
    if blocks < 1:
        raise ConfigError("blocks must be >= 1")
    if block_size < 2:
        raise ConfigError("block_size must be >= 2")
    if not (0 <= p_out < p_in <= 1):
        raise ConfigError("need 0 <= p_out < p_in <= 1")
    n = blocks * block_size
    membership = np.repeat(np.arange(blocks), block_size)
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    prob = np.where(membership[iu] == membership[ju], p_in, p_out)
    keep = rng.random(iu.size) < prob
    graph = Graph.from_edges([str(i) for i in range(n)], zip(iu[keep], ju[keep], np.ones(keep.sum())))
    return graph, GroundTruth.from_labels(membership)
