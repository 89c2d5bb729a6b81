"""Consecutive pattern growth and incremental embedding maintenance.

A pattern grows by exactly one edge at a time, and the new edge always takes
pattern timestamp |E|+1, so there is at most one way to grow one pattern into
another and a depth-first search over grown patterns never revisits a
pattern.  Three growth shapes cover the whole T-connected pattern space:
forward (new destination node), backward (new source node), and inward (both
endpoints already present; this is what admits multi-edges).

Extensions are enumerated from the embeddings of the current pattern, so
every emitted extension is realizable and every grown pattern has support.
Self-loop data edges are never offered as extensions: patterns model
pairwise interactions and exclude self-loops.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Optional, Sequence

from .graphs import Embedding, TemporalEdge, TemporalGraph, TemporalPattern


class InvalidExtension(ValueError):
    pass


_KIND_ORDER = {"seed": 0, "forward": 1, "backward": 2, "inward": 3}


@dataclass(frozen=True)
class Extension:
    """One abstract growth step, deduplicated across embeddings and graphs.

    seed:     src_label/dst_label set, both nodes new (empty pattern only)
    forward:  src = existing node index, dst_label = new node's label
    backward: src_label = new node's label, dst = existing node index
    inward:   src and dst both existing node indices
    """

    kind: str
    src: Optional[int] = None
    dst: Optional[int] = None
    src_label: Optional[str] = None
    dst_label: Optional[str] = None

    def sort_key(self) -> tuple:
        return (
            _KIND_ORDER[self.kind],
            self.src if self.src is not None else -1,
            self.dst if self.dst is not None else -1,
            self.src_label or "",
            self.dst_label or "",
        )


@dataclass(frozen=True)
class EmbeddingTable:
    """All known matches of one pattern, per data graph.

    ``entries[graph_id]`` lists embeddings; graphs in ``truncated`` hit the
    per-graph cap, so their lists (and anything derived from them other than
    plain existence) are incomplete.
    """

    entries: dict[str, list[Embedding]]
    truncated: frozenset[str] = frozenset()

    @property
    def exact(self) -> bool:
        return not self.truncated

    def support_ids(self) -> list[str]:
        return [gid for gid, embs in self.entries.items() if embs]

    def total_embeddings(self) -> int:
        return sum(len(v) for v in self.entries.values())


def empty_pattern() -> TemporalPattern:
    return TemporalPattern("empty", (), ())


def empty_table(graphs: Sequence[TemporalGraph]) -> EmbeddingTable:
    """The empty pattern matches every graph once, before all of its edges."""
    return EmbeddingTable({g.id: [Embedding((), ())] for g in graphs})


def enumerate_extensions(
    p: TemporalPattern,
    table: EmbeddingTable,
    graphs: Sequence[TemporalGraph],
) -> list[Extension]:
    """All distinct growth steps realizable from the stored embeddings.

    For every embedding and every data edge strictly later than the
    embedding's last matched timestamp, the edge is classified by which of
    its endpoints the embedding already maps.  The empty pattern's
    extensions are the distinct (source label, destination label) seeds.
    """
    out: set[Extension] = set()
    for g in graphs:
        embs = table.entries.get(g.id)
        if not embs:
            continue
        ts = g.timestamps
        for emb in embs:
            inverse = {dn: i for i, dn in enumerate(emb.nodes)}
            for pos in range(bisect_right(ts, emb.max_data_time), len(g.edges)):
                e = g.edges[pos]
                if e.src == e.dst:
                    continue
                si = inverse.get(e.src)
                di = inverse.get(e.dst)
                if si is None and di is None:
                    if not emb.nodes:
                        out.add(Extension("seed", src_label=g.labels[e.src], dst_label=g.labels[e.dst]))
                elif si is not None and di is None:
                    out.add(Extension("forward", src=si, dst_label=g.labels[e.dst]))
                elif si is None and di is not None:
                    out.add(Extension("backward", dst=di, src_label=g.labels[e.src]))
                else:
                    out.add(Extension("inward", src=si, dst=di))
    return sorted(out, key=Extension.sort_key)


def grow(p: TemporalPattern, x: Extension) -> TemporalPattern:
    """p plus one edge at pattern timestamp |E|+1; T-connected by construction.

    New nodes take the next free index, which is exactly their first-visit
    position, so grown patterns stay in canonical form.
    """
    n = p.n_nodes
    t = p.n_edges + 1
    labels = list(p.labels)
    if x.kind == "seed":
        if p.n_edges != 0 or not x.src_label or not x.dst_label:
            raise InvalidExtension(f"seed extension not applicable: {x}")
        return TemporalPattern(p.id, (x.src_label, x.dst_label), (TemporalEdge(0, 1, 1),))
    if p.n_edges == 0:
        raise InvalidExtension("only seed extensions can grow the empty pattern")
    if x.kind == "forward":
        if x.src is None or not (0 <= x.src < n) or not x.dst_label:
            raise InvalidExtension(f"bad forward extension {x} for {n}-node pattern")
        labels.append(x.dst_label)
        edge = TemporalEdge(x.src, n, t)
    elif x.kind == "backward":
        if x.dst is None or not (0 <= x.dst < n) or not x.src_label:
            raise InvalidExtension(f"bad backward extension {x} for {n}-node pattern")
        labels.append(x.src_label)
        edge = TemporalEdge(n, x.dst, t)
    elif x.kind == "inward":
        if (
            x.src is None
            or x.dst is None
            or not (0 <= x.src < n)
            or not (0 <= x.dst < n)
            or x.src == x.dst
        ):
            raise InvalidExtension(f"bad inward extension {x} for {n}-node pattern")
        edge = TemporalEdge(x.src, x.dst, t)
    else:
        raise InvalidExtension(f"unknown extension kind {x.kind!r}")
    return TemporalPattern(p.id, labels, p.edges + (edge,))


def expand(
    table: EmbeddingTable,
    graphs: Sequence[TemporalGraph],
    cap: int = 10_000,
) -> dict[Extension, EmbeddingTable]:
    """All extensions and their child tables, from one pass over the embeddings.

    Semantically identical to running enumerate_extensions followed by
    extend_embeddings per extension, but every (embedding, later edge) pair
    is classified exactly once, which is what makes deep searches affordable.
    Keys come back in deterministic sort order.
    """
    entries: dict[Extension, dict[str, list[Embedding]]] = {}
    truncated: dict[Extension, set[str]] = {}
    for g in graphs:
        parents = table.entries.get(g.id)
        if not parents:
            continue
        ts = g.timestamps
        labels = g.labels
        edges = g.edges
        parent_truncated = g.id in table.truncated
        for emb in parents:
            nodes = emb.nodes
            times = emb.times
            inverse = {dn: i for i, dn in enumerate(nodes)}
            for pos in range(bisect_right(ts, emb.max_data_time), len(edges)):
                e = edges[pos]
                if e.src == e.dst:
                    continue
                si = inverse.get(e.src)
                di = inverse.get(e.dst)
                if si is None and di is None:
                    if nodes:
                        continue
                    ext = Extension("seed", src_label=labels[e.src], dst_label=labels[e.dst])
                    child = Embedding((e.src, e.dst), (e.t,))
                elif di is None:
                    ext = Extension("forward", src=si, dst_label=labels[e.dst])
                    child = Embedding(nodes + (e.dst,), times + (e.t,))
                elif si is None:
                    ext = Extension("backward", dst=di, src_label=labels[e.src])
                    child = Embedding(nodes + (e.src,), times + (e.t,))
                else:
                    ext = Extension("inward", src=si, dst=di)
                    child = Embedding(nodes, times + (e.t,))
                bucket = entries.setdefault(ext, {})
                out = bucket.get(g.id)
                if out is None:
                    out = bucket[g.id] = []
                if len(out) < cap:
                    out.append(child)
                else:
                    truncated.setdefault(ext, set()).add(g.id)
    result: dict[Extension, EmbeddingTable] = {}
    for ext in sorted(entries, key=Extension.sort_key):
        bad = truncated.get(ext, set())
        if table.truncated:
            bad = bad | set(table.truncated)
        result[ext] = EmbeddingTable(entries[ext], frozenset(bad))
    return result


def extend_embeddings(
    table: EmbeddingTable,
    x: Extension,
    graphs: Sequence[TemporalGraph],
    cap: int = 10_000,
) -> EmbeddingTable:
    """Embedding table of the grown pattern, derived from the parent's table.

    Each parent embedding spawns one child per data edge that realizes the
    extension with a timestamp after the parent's last matched edge.  Lists
    stop growing at ``cap`` per graph and are flagged truncated (parent
    truncation is inherited).
    """
    entries: dict[str, list[Embedding]] = {}
    truncated = set(table.truncated)
    for g in graphs:
        parents = table.entries.get(g.id)
        if not parents:
            continue
        out: list[Embedding] = []
        ts = g.timestamps
        room = cap
        full = False
        for emb in parents:
            if full:
                break
            nodes = emb.nodes
            for pos in range(bisect_right(ts, emb.max_data_time), len(g.edges)):
                e = g.edges[pos]
                if e.src == e.dst:
                    continue
                if x.kind == "seed":
                    if g.labels[e.src] == x.src_label and g.labels[e.dst] == x.dst_label:
                        child = Embedding((e.src, e.dst), (e.t,))
                    else:
                        continue
                elif x.kind == "forward":
                    if (
                        e.src == nodes[x.src]
                        and g.labels[e.dst] == x.dst_label
                        and e.dst not in nodes
                    ):
                        child = Embedding(nodes + (e.dst,), emb.times + (e.t,))
                    else:
                        continue
                elif x.kind == "backward":
                    if (
                        e.dst == nodes[x.dst]
                        and g.labels[e.src] == x.src_label
                        and e.src not in nodes
                    ):
                        child = Embedding(nodes + (e.src,), emb.times + (e.t,))
                    else:
                        continue
                else:  # inward
                    if e.src == nodes[x.src] and e.dst == nodes[x.dst]:
                        child = Embedding(nodes, emb.times + (e.t,))
                    else:
                        continue
                if room <= 0:
                    truncated.add(g.id)
                    full = True
                    break
                out.append(child)
                room -= 1
        if out:
            entries[g.id] = out
    return EmbeddingTable(entries, frozenset(truncated))
