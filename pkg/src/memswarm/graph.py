"""Weighted undirected graphs with two terminals, plus classical path oracles.

Edges are identified by dense integer ids in insertion order.  Every state
vector in the package (pheromone, device state) is indexed by these ids.
"""

from __future__ import annotations

import heapq
import math
from collections.abc import Hashable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import (
    DisconnectedTerminals,
    GraphError,
    NoPathExtractable,
    NonPositiveLength,
    PathBudgetExceeded,
    SelfLoop,
    UnknownTerminal,
)

Node = Hashable


@dataclass(frozen=True)
class Edge:
    u: Node
    v: Node
    length: float
    edge_id: int

    def other(self, node: Node) -> Node:
        return self.v if node == self.u else self.u


@dataclass(frozen=True)
class Path:
    """A simple source-to-target path as an ordered tuple of edge ids."""

    edges: tuple[int, ...]
    total_length: float

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)


@dataclass(frozen=True, eq=False)
class Graph:
    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]
    source: Node
    target: Node
    _adjacency: Mapping[Node, tuple[int, ...]] = field(repr=False, compare=False)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def lengths(self) -> np.ndarray:
        return np.array([e.length for e in self.edges], dtype=float)

    def incident(self, node: Node) -> tuple[int, ...]:
        """Edge ids touching ``node``, ascending."""
        return self._adjacency[node]

    def make_path(self, edge_ids: Iterable[int]) -> Path:
        ids = tuple(int(e) for e in edge_ids)
        return Path(ids, math.fsum(self.edges[e].length for e in ids))

    def path_nodes(self, path: Path | Sequence[int]) -> list[Node]:
        """Node sequence visited by ``path`` starting at the source."""
        ids = path.edges if isinstance(path, Path) else tuple(path)
        seq = [self.source]
        for e in ids:
            edge = self.edges[e]
            if seq[-1] not in (edge.u, edge.v):
                raise GraphError(f"edge {e} does not continue the walk at {seq[-1]!r}")
            seq.append(edge.other(seq[-1]))
        return seq

    def is_parallel_paths(self) -> bool:
        """True when every edge joins source and target directly."""
        ends = {self.source, self.target}
        return all({e.u, e.v} == ends for e in self.edges)

    def to_dict(self) -> dict[str, Any]:
        return {
            "nodes": list(self.nodes),
            "edges": [[e.u, e.v, e.length] for e in self.edges],
            "source": self.source,
            "target": self.target,
        }


def build_graph(
    edge_list: Iterable[Sequence[Any]],
    source: Node,
    target: Node,
    nodes: Sequence[Node] | None = None,
) -> Graph:
    """Validate an edge list and return a :class:`Graph`.

    ``nodes`` may list isolated nodes explicitly; when given, terminals and
    edge endpoints must appear in it.  Without it the node set is inferred
    from the edges in order of first appearance.
    """
    raw = [tuple(item) for item in edge_list]
    if nodes is not None:
        node_list = list(dict.fromkeys(nodes))
        known = set(node_list)
        for term in (source, target):
            if term not in known:
                raise UnknownTerminal(f"terminal {term!r} is not in the node list")
    else:
        node_list = []
        known = set()

    edges = []
    for i, item in enumerate(raw):
        if len(item) != 3:
            raise GraphError(f"edge {i} must be (u, v, length), got {item!r}")
        u, v, length = item
        try:
            length = float(length)
        except (TypeError, ValueError):
            raise GraphError(f"edge {i} has non-numeric length {length!r}") from None
        if not (math.isfinite(length) and length > 0):
            raise NonPositiveLength(f"edge {i} ({u!r}, {v!r}) has length {length}")
        if u == v:
            raise SelfLoop(f"edge {i} is a self-loop on {u!r}")
        for node in (u, v):
            if node not in known:
                if nodes is not None:
                    raise GraphError(f"edge {i} endpoint {node!r} is not in the node list")
                known.add(node)
                node_list.append(node)
        edges.append(Edge(u, v, length, i))

    if source == target:
        raise GraphError("source and target must differ")
    for term in (source, target):
        if term not in known:
            raise DisconnectedTerminals(f"terminal {term!r} touches no edge")

    adjacency: dict[Node, list[int]] = {n: [] for n in node_list}
    for e in edges:
        adjacency[e.u].append(e.edge_id)
        adjacency[e.v].append(e.edge_id)
    g = Graph(
        tuple(node_list),
        tuple(edges),
        source,
        target,
        {n: tuple(ids) for n, ids in adjacency.items()},
    )
    if target not in hop_distances(g, source):
        raise DisconnectedTerminals(f"no path joins {source!r} and {target!r}")
    return g


def graph_from_dict(data: Mapping[str, Any]) -> Graph:
    """Build a graph from ``{"nodes", "edges", "source", "target"}``."""
    missing = [k for k in ("edges", "source", "target") if k not in data]
    if missing:
        raise GraphError(f"graph is missing {', '.join(missing)}")
    return build_graph(data["edges"], data["source"], data["target"], nodes=data.get("nodes"))


def hop_distances(g: Graph, start: Node) -> dict[Node, int]:
    """Breadth-first hop counts from ``start`` to every reachable node."""
    dist = {start: 0}
    frontier = [start]
    while frontier:
        nxt = []
        for node in frontier:
            for e in g.incident(node):
                other = g.edges[e].other(node)
                if other not in dist:
                    dist[other] = dist[node] + 1
                    nxt.append(other)
        frontier = nxt
    return dist


def shortest_path_oracle(g: Graph) -> Path:
    """Dijkstra on (length, edge-id sequence) keys.

    Comparing the edge-id tuples lexicographically breaks length ties in
    favour of the smallest sequence.  Lengths are recomputed with ``fsum``
    along each candidate so totals agree exactly with
    :func:`enumerate_simple_paths`.
    """
    best: dict[Node, tuple[float, tuple[int, ...]]] = {g.source: (0.0, ())}
    heap = [(0.0, (), g.source)]
    done = set()
    while heap:
        dist, seq, node = heapq.heappop(heap)
        if node in done:
            continue
        done.add(node)
        if node == g.target:
            return Path(seq, dist)
        for e in g.incident(node):
            other = g.edges[e].other(node)
            if other in done:
                continue
            cand_seq = seq + (e,)
            cand = (math.fsum(g.edges[i].length for i in cand_seq), cand_seq)
            if other not in best or cand < best[other]:
                best[other] = cand
                heapq.heappush(heap, (cand[0], cand_seq, other))
    raise DisconnectedTerminals("target unreachable")  # excluded by build_graph


def enumerate_simple_paths(g: Graph, max_paths: int = 10_000) -> list[Path]:
    """All simple source-target paths sorted by (length, edge ids).

    Raises :class:`PathBudgetExceeded` as soon as more than ``max_paths``
    paths are found.
    """
    found: list[Path] = []
    visited = {g.source}
    stack: list[int] = []

    def walk(node: Node) -> None:
        for e in g.incident(node):
            other = g.edges[e].other(node)
            if other in visited:
                continue
            stack.append(e)
            if other == g.target:
                found.append(g.make_path(stack))
                if len(found) > max_paths:
                    raise PathBudgetExceeded(f"more than {max_paths} simple paths")
            else:
                visited.add(other)
                walk(other)
                visited.discard(other)
            stack.pop()

    walk(g.source)
    found.sort(key=lambda p: (p.total_length, p.edges))
    return found


def validate_path(g: Graph, path: Path) -> None:
    """Raise :class:`GraphError` unless ``path`` is a simple source-target path."""
    if not path.edges:
        raise GraphError("empty path")
    seq = g.path_nodes(path)
    if seq[-1] != g.target:
        raise GraphError(f"path ends at {seq[-1]!r}, not the target")
    if len(set(seq)) != len(seq):
        raise GraphError("path revisits a node")
    if not math.isclose(path.total_length, g.make_path(path.edges).total_length):
        raise GraphError("total_length does not match member lengths")


def greedy_path(g: Graph, values: Sequence[float]) -> Path:
    """Walk from the source along the unvisited neighbour edge of largest value.

    Ties go to the lowest edge id.  Raises :class:`NoPathExtractable` when the
    walk dead-ends before the target.
    """
    values = np.asarray(values, dtype=float)
    node, visited, taken = g.source, {g.source}, []
    while node != g.target:
        options = [e for e in g.incident(node) if g.edges[e].other(node) not in visited]
        if not options:
            raise NoPathExtractable(f"greedy walk dead-ends at {node!r}")
        e = max(options, key=lambda i: (values[i], -i))
        taken.append(e)
        node = g.edges[e].other(node)
        visited.add(node)
    return g.make_path(taken)


def extract_path(g: Graph, values: Sequence[float], theta: float = 0.5) -> Path:
    """Read a path off per-edge values.

    Edges with value at least ``theta * max(values)`` are kept; if they
    contain exactly one simple source-target path it is returned, otherwise
    the result of :func:`greedy_path`.
    """
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    values = np.asarray(values, dtype=float)
    if values.shape != (g.n_edges,):
        raise ValueError(f"expected {g.n_edges} edge values, got shape {values.shape}")
    keep = [e for e in g.edges if values[e.edge_id] >= theta * values.max()]
    try:
        sub = build_graph([(e.u, e.v, e.length) for e in keep], g.source, g.target)
        paths = enumerate_simple_paths(sub, max_paths=1)
    except (DisconnectedTerminals, PathBudgetExceeded):
        return greedy_path(g, values)
    return g.make_path(keep[i].edge_id for i in paths[0].edges)
