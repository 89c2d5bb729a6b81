"""Core temporal graph model.

A temporal graph is a labeled directed multigraph whose edges carry
distinct, totally ordered integer timestamps.  A temporal pattern is a
temporal graph whose timestamps are exactly 1..|E|; patterns are the unit
of search in the miner.  An embedding is one concrete match of a pattern
inside a data graph: an injective node map plus an order-preserving
timestamp map.
"""

from __future__ import annotations

import sys
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

MAX_TIMESTAMP = 2**63 - 1


class GraphError(ValueError):
    """Base class for temporal graph validation failures."""


class DuplicateTimestamp(GraphError):
    pass


class DanglingEndpoint(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class EmptyLabel(GraphError):
    pass


class NotTConnected(GraphError):
    pass


@dataclass(frozen=True)
class TemporalEdge:
    """Directed edge with an integer timestamp (unitless tick)."""

    src: int
    dst: int
    t: int


class TemporalGraph:
    """Labeled directed temporal multigraph.

    Nodes are dense integer indices 0..n-1; ``labels[i]`` is the label of
    node i.  Edges are stored sorted by strictly increasing timestamp.
    Instances are immutable after construction and safe to share between
    threads; derived structures (adjacency, degree profiles, sequence
    encodings) are computed lazily and cached.
    """

    __slots__ = ("id", "labels", "edges", "_cache")

    def __init__(self, graph_id: str, labels: Sequence[str], edges: Sequence[TemporalEdge]):
        self.id = graph_id
        self.labels = tuple(sys.intern(l) for l in labels)
        self.edges = tuple(edges)
        self._cache: dict = {}

    @property
    def n_nodes(self) -> int:
        return len(self.labels)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def timestamps(self) -> tuple[int, ...]:
        ts = self._cache.get("timestamps")
        if ts is None:
            ts = tuple(e.t for e in self.edges)
            self._cache["timestamps"] = ts
        return ts

    def edges_after(self, t: int) -> int:
        """Number of edges with timestamp strictly greater than t."""
        ts = self.timestamps
        return len(ts) - bisect_right(ts, t)

    def suffix_label_set(self, t: int) -> frozenset[str]:
        """Labels on nodes incident to edges with timestamp > t (memoized)."""
        start = bisect_right(self.timestamps, t)
        memo = self._cache.setdefault("suffix_labels", {})
        got = memo.get(start)
        if got is None:
            out = set()
            for i in range(start, len(self.edges)):
                e = self.edges[i]
                out.add(self.labels[e.src])
                out.add(self.labels[e.dst])
            got = memo[start] = frozenset(out)
        return got

    def label_pair_index(self) -> dict[tuple[str, str], list[int]]:
        """Edge positions grouped by (source label, destination label)."""
        idx = self._cache.get("label_pair_index")
        if idx is None:
            idx = {}
            for i, e in enumerate(self.edges):
                idx.setdefault((self.labels[e.src], self.labels[e.dst]), []).append(i)
            self._cache["label_pair_index"] = idx
        return idx

    def degree_profile(self) -> tuple:
        """Per-node (in degree, out degree, in-neighbor label counts, out-neighbor label counts)."""
        prof = self._cache.get("degree_profile")
        if prof is None:
            n = self.n_nodes
            indeg = [0] * n
            outdeg = [0] * n
            innbr: list[dict[str, int]] = [dict() for _ in range(n)]
            outnbr: list[dict[str, int]] = [dict() for _ in range(n)]
            for e in self.edges:
                outdeg[e.src] += 1
                indeg[e.dst] += 1
                dl = self.labels[e.dst]
                sl = self.labels[e.src]
                outnbr[e.src][dl] = outnbr[e.src].get(dl, 0) + 1
                innbr[e.dst][sl] = innbr[e.dst].get(sl, 0) + 1
            prof = (tuple(indeg), tuple(outdeg), tuple(innbr), tuple(outnbr))
            self._cache["degree_profile"] = prof
        return prof

    def label_multiset(self) -> tuple[str, ...]:
        key = self._cache.get("label_multiset")
        if key is None:
            key = tuple(sorted(self.labels))
            self._cache["label_multiset"] = key
        return key

    def label_set(self) -> frozenset[str]:
        s = self._cache.get("label_set")
        if s is None:
            s = frozenset(self.labels)
            self._cache["label_set"] = s
        return s

    def __repr__(self):
        return f"TemporalGraph({self.id!r}, {self.n_nodes} nodes, {self.n_edges} edges)"


class TemporalPattern(TemporalGraph):
    """Temporal graph whose timestamps are exactly 1..|E| and which is T-connected.

    Patterns produced by :func:`canonical_pattern` and by pattern growth are
    in canonical form: node indices follow first-visit order under the edge
    timestamp traversal, so two equivalent patterns are structurally
    identical and :meth:`key` can be used for hashing and deduplication.
    """

    def key(self) -> tuple:
        k = self._cache.get("key")
        if k is None:
            k = (self.labels, tuple((e.src, e.dst) for e in self.edges))
            self._cache["key"] = k
        return k

    def text(self) -> str:
        """Canonical one-line rendering, usable as a deterministic sort key."""
        parts = []
        for e in self.edges:
            parts.append(f"{e.src}:{self.labels[e.src]}->{e.dst}:{self.labels[e.dst]}@{e.t}")
        return ";".join(parts)

    def __repr__(self):
        return f"TemporalPattern({self.text()!r})"


@dataclass(frozen=True)
class Embedding:
    """One match of a pattern inside a data graph.

    ``nodes[i]`` is the data node that pattern node i maps to (injective);
    ``times[k-1]`` is the data timestamp that pattern timestamp k maps to
    (strictly increasing).
    """

    nodes: tuple[int, ...]
    times: tuple[int, ...]

    @property
    def max_data_time(self) -> int:
        # Sentinel -1 sorts before any valid timestamp (timestamps are >= 0),
        # so the empty pattern's residual is the whole graph.
        return self.times[-1] if self.times else -1


def validate(
    graph_id: str,
    labels: Sequence[str],
    edges: Iterable[tuple[int, int, int]],
    allow_self_loops: bool = False,
) -> TemporalGraph:
    """Build a validated TemporalGraph from raw node labels and (src, dst, t) triples.

    Edges are sorted by timestamp.  Raises DuplicateTimestamp, DanglingEndpoint,
    SelfLoop (unless allow_self_loops) or EmptyLabel on invariant violations.
    """
    labels = list(labels)
    for i, lab in enumerate(labels):
        if not lab:
            raise EmptyLabel(f"graph {graph_id}: node {i} has an empty label")
    n = len(labels)
    built = []
    for src, dst, t in edges:
        if not (0 <= src < n) or not (0 <= dst < n):
            raise DanglingEndpoint(f"graph {graph_id}: edge ({src},{dst},{t}) has an endpoint outside 0..{n - 1}")
        if src == dst and not allow_self_loops:
            raise SelfLoop(f"graph {graph_id}: self-loop on node {src} at t={t}")
        if not (0 <= t <= MAX_TIMESTAMP):
            raise GraphError(f"graph {graph_id}: timestamp {t} outside the supported range")
        built.append(TemporalEdge(src, dst, t))
    built.sort(key=lambda e: e.t)
    for a, b in zip(built, built[1:]):
        if a.t == b.t:
            raise DuplicateTimestamp(f"graph {graph_id}: two edges share timestamp {a.t}")
    return TemporalGraph(graph_id, labels, built)


def is_t_connected(g: TemporalGraph) -> bool:
    """True iff every timestamp-prefix of the edge sequence forms a connected graph.

    Empty and single-edge graphs count as connected.  Uses an incremental
    union-find over the edges in timestamp order, checking after each edge
    that all nodes seen so far form one component.
    """
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    components = 0
    for e in g.edges:
        for v in (e.src, e.dst):
            if v not in parent:
                parent[v] = v
                components += 1
        ru, rv = find(e.src), find(e.dst)
        if ru != rv:
            parent[ru] = rv
            components -= 1
        if components != 1:
            return False
    return True


def _patterns_equal_ops(p1: TemporalPattern, p2: TemporalPattern) -> tuple[Optional[Embedding], int]:
    """Linear-scan pattern equality; returns (mapping, map-operation count).

    Edges are matched by equal timestamp (pattern timestamps are 1..|E|, so
    edge k of one pattern can only match edge k of the other), building the
    node map incrementally and rejecting any non-one-to-one assignment.
    """
    ops = 0
    if p1.n_edges != p2.n_edges or p1.n_nodes != p2.n_nodes:
        return None, ops
    fwd: dict[int, int] = {}
    rev: dict[int, int] = {}

    def bind(u: int, v: int) -> bool:
        nonlocal ops
        ops += 1
        got = fwd.get(u)
        if got is not None:
            return got == v
        if v in rev:
            return False
        if p1.labels[u] != p2.labels[v]:
            return False
        fwd[u] = v
        rev[v] = u
        return True

    for e1, e2 in zip(p1.edges, p2.edges):
        if e1.t != e2.t:
            return None, ops
        if not bind(e1.src, e2.src) or not bind(e1.dst, e2.dst):
            return None, ops
    if len(fwd) != p1.n_nodes:
        # Isolated nodes never occur in valid patterns, but guard anyway.
        return None, ops
    times = tuple(e.t for e in p2.edges)
    nodes = tuple(fwd[i] for i in range(p1.n_nodes))
    return Embedding(nodes, times), ops


def patterns_equal(p1: TemporalPattern, p2: TemporalPattern) -> Optional[Embedding]:
    """If the two patterns match, return the unique bijective node/time mapping."""
    emb, _ = _patterns_equal_ops(p1, p2)
    return emb


def canonical_pattern(
    labels: Mapping[int, str] | Sequence[str],
    edges: Iterable[tuple[int, int, int]],
    graph_id: str = "pattern",
    strict: bool = True,
) -> TemporalPattern:
    """Re-map an edge list with distinct timestamps into canonical pattern form.

    Timestamps become 1..|E| preserving order; node indices are compacted in
    first-visit order under the timestamp traversal.  With strict=True the
    result must be T-connected (NotTConnected otherwise).
    """
    if not isinstance(labels, Mapping):
        labels = {i: lab for i, lab in enumerate(labels)}
    ordered = sorted(edges, key=lambda e: e[2])
    for a, b in zip(ordered, ordered[1:]):
        if a[2] == b[2]:
            raise DuplicateTimestamp(f"duplicate timestamp {a[2]} in pattern edge list")
    remap: dict[int, int] = {}
    new_labels: list[str] = []

    def visit(node: int) -> int:
        if node not in remap:
            lab = labels[node]
            if not lab:
                raise EmptyLabel(f"node {node} has an empty label")
            remap[node] = len(new_labels)
            new_labels.append(lab)
        return remap[node]

    new_edges = []
    for k, (src, dst, _) in enumerate(ordered, start=1):
        new_edges.append(TemporalEdge(visit(src), visit(dst), k))
    pattern = TemporalPattern(graph_id, new_labels, new_edges)
    if strict and not is_t_connected(pattern):
        raise NotTConnected(f"edge list does not form a T-connected pattern: {pattern.text()}")
    return pattern


def pattern_of(g: TemporalGraph, strict: bool = True) -> TemporalPattern:
    """Canonical pattern carrying the same structure as g."""
    return canonical_pattern(g.labels, [(e.src, e.dst, e.t) for e in g.edges], graph_id=g.id, strict=strict)


def verify_embedding(p: TemporalPattern, g: TemporalGraph, emb: Embedding) -> bool:
    """Independently check that emb is a valid match of p inside g."""
    if len(emb.nodes) != p.n_nodes or len(emb.times) != p.n_edges:
        return False
    if len(set(emb.nodes)) != len(emb.nodes):
        return False
    for i, data_node in enumerate(emb.nodes):
        if not (0 <= data_node < g.n_nodes) or p.labels[i] != g.labels[data_node]:
            return False
    if any(a >= b for a, b in zip(emb.times, emb.times[1:])):
        return False
    data_edges = {(e.src, e.dst, e.t) for e in g.edges}
    for e in p.edges:
        mapped = (emb.nodes[e.src], emb.nodes[e.dst], emb.times[e.t - 1])
        if mapped not in data_edges:
            return False
    return True
