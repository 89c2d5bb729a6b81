"""Brute-force reference implementations for cross-checking the fast paths.

Everything here is deliberately simple and slow: exhaustive backtracking for
subgraph tests, edge-subset enumeration for pattern spaces, and full
re-enumeration for residual comparisons.  These functions share no code with
the production search/matching paths so that agreement between the two is
meaningful evidence of correctness.  Budgets fail loudly instead of
degrading, so a passing test run implies full oracle coverage.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .graphs import Embedding, TemporalGraph, TemporalPattern


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    max_nodes: int = 200
    max_edges: int = 64
    max_pattern_edges: int = 8
    max_labels: int = 64
    wall_seconds: float = 60.0

    def check_graph(self, g: TemporalGraph) -> None:
        if g.n_nodes > self.max_nodes or g.n_edges > self.max_edges:
            raise BudgetExceeded(f"graph {g.id} exceeds oracle budget ({g.n_nodes} nodes, {g.n_edges} edges)")
        if len(set(g.labels)) > self.max_labels:
            raise BudgetExceeded(f"graph {g.id} exceeds oracle label budget")

    def check_pattern(self, p: TemporalPattern) -> None:
        if p.n_edges > self.max_pattern_edges:
            raise BudgetExceeded(f"pattern with {p.n_edges} edges exceeds oracle budget")


class _Deadline:
    def __init__(self, seconds: float):
        self.expires = time.monotonic() + seconds

    def check(self) -> None:
        if time.monotonic() > self.expires:
            raise BudgetExceeded("oracle wall-time budget exhausted")


def _assignments(p: TemporalPattern, g: TemporalGraph, deadline: _Deadline):
    """Yield every (node map, data edge positions) realizing p inside g.

    Backtracks over pattern edges in timestamp order, assigning each to a
    strictly later data edge with matching endpoint labels and a consistent
    one-to-one node correspondence.
    """
    m = p.n_edges
    fwd: dict[int, int] = {}
    rev: dict[int, int] = {}
    chosen: list[int] = []

    def rec(k: int, min_pos: int):
        deadline.check()
        if k == m:
            yield dict(fwd), tuple(chosen)
            return
        pe = p.edges[k]
        for pos in range(min_pos, g.n_edges):
            ge = g.edges[pos]
            if p.labels[pe.src] != g.labels[ge.src] or p.labels[pe.dst] != g.labels[ge.dst]:
                continue
            bound = []
            ok = True
            for u, v in ((pe.src, ge.src), (pe.dst, ge.dst)):
                got = fwd.get(u)
                if got is not None:
                    if got != v:
                        ok = False
                        break
                elif v in rev:
                    ok = False
                    break
                else:
                    fwd[u] = v
                    rev[v] = u
                    bound.append((u, v))
            if ok:
                chosen.append(pos)
                yield from rec(k + 1, pos + 1)
                chosen.pop()
            for u, v in bound:
                del fwd[u]
                del rev[v]

    yield from rec(0, 0)


def _to_embedding(p: TemporalPattern, g: TemporalGraph, fmap: dict[int, int], positions: tuple[int, ...]) -> Embedding:
    nodes = tuple(fmap[i] for i in range(p.n_nodes))
    times = tuple(g.edges[pos].t for pos in positions)
    return Embedding(nodes, times)


def oracle_subgraph_test(
    p: TemporalPattern,
    g: TemporalGraph,
    budget: OracleBudget = OracleBudget(),
) -> Optional[Embedding]:
    """Exhaustive backtracking temporal subgraph test; first witness wins."""
    budget.check_pattern(p)
    budget.check_graph(g)
    deadline = _Deadline(budget.wall_seconds)
    if p.n_nodes == 0:
        return Embedding((), ())
    for fmap, positions in _assignments(p, g, deadline):
        return _to_embedding(p, g, fmap, positions)
    return None


def oracle_embeddings(
    p: TemporalPattern,
    g: TemporalGraph,
    budget: OracleBudget = OracleBudget(),
) -> list[Embedding]:
    """All distinct matches of p inside g, by exhaustive backtracking."""
    budget.check_pattern(p)
    budget.check_graph(g)
    deadline = _Deadline(budget.wall_seconds)
    if p.n_nodes == 0:
        return [Embedding((), ())]
    out = []
    seen = set()
    for fmap, positions in _assignments(p, g, deadline):
        emb = _to_embedding(p, g, fmap, positions)
        if emb not in seen:
            seen.add(emb)
            out.append(emb)
    return out


def _canonical_string(labels: Sequence[str], edges: list[tuple[int, int, int]]) -> str:
    """First-visit canonical rendering, independent of graphs.canonical_pattern."""
    order = sorted(edges, key=lambda e: e[2])
    remap: dict[int, int] = {}
    parts = []
    for src, dst, _ in order:
        for v in (src, dst):
            if v not in remap:
                remap[v] = len(remap)
        parts.append(f"{remap[src]}|{labels[src]}|{remap[dst]}|{labels[dst]}")
    return ";".join(parts)


def _prefixes_connected(edges: list[tuple[int, int, int]]) -> bool:
    """Direct prefix-connectivity check: rebuild each prefix and walk components."""
    order = sorted(edges, key=lambda e: e[2])
    for k in range(1, len(order) + 1):
        prefix = order[:k]
        nodes = set()
        adj: dict[int, set[int]] = {}
        for src, dst, _ in prefix:
            nodes.add(src)
            nodes.add(dst)
            adj.setdefault(src, set()).add(dst)
            adj.setdefault(dst, set()).add(src)
        start = next(iter(nodes))
        seen = {start}
        stack = [start]
        while stack:
            for nxt in adj.get(stack.pop(), ()):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        if seen != nodes:
            return False
    return True


def oracle_enumerate_patterns(
    graphs: Iterable[TemporalGraph],
    max_edges: int,
    budget: OracleBudget = OracleBudget(),
) -> dict[str, TemporalPattern]:
    """Every T-connected pattern with at least one match in any graph, up to max_edges.

    Enumerates all edge subsets of each graph, keeps the prefix-connected
    ones, and deduplicates by an independent canonical string.  Returns a
    mapping canonical string -> one representative pattern.
    """
    from .graphs import canonical_pattern  # structural constructor only

    deadline = _Deadline(budget.wall_seconds)
    found: dict[str, TemporalPattern] = {}
    for g in graphs:
        budget.check_graph(g)
        raw = [(e.src, e.dst, e.t) for e in g.edges]
        for size in range(1, max_edges + 1):
            for subset in combinations(raw, size):
                deadline.check()
                subset = list(subset)
                if not _prefixes_connected(subset):
                    continue
                key = _canonical_string(g.labels, subset)
                if key not in found:
                    found[key] = canonical_pattern(
                        {i: g.labels[i] for i in {v for s, d, _ in subset for v in (s, d)}},
                        subset,
                        graph_id=key,
                    )
    return found


def oracle_frequency(
    p: TemporalPattern,
    graphs: Sequence[TemporalGraph],
    budget: OracleBudget = OracleBudget(),
) -> float:
    if not graphs:
        raise ValueError("frequency over an empty graph set")
    hits = sum(1 for g in graphs if oracle_subgraph_test(p, g, budget) is not None)
    return hits / len(graphs)


def oracle_best_score(
    positives: Sequence[TemporalGraph],
    negatives: Sequence[TemporalGraph],
    max_edges: int,
    score_fn,
    budget: OracleBudget = OracleBudget(),
) -> tuple[float, dict[str, TemporalPattern]]:
    """Exhaustive maximum discriminative score over patterns supported in the positives.

    Returns (best score, canonical string -> pattern for every maximizer).
    """
    universe = oracle_enumerate_patterns(positives, max_edges, budget)
    best = float("-inf")
    argmax: dict[str, TemporalPattern] = {}
    for key, p in universe.items():
        x = oracle_frequency(p, positives, budget)
        y = oracle_frequency(p, negatives, budget)
        s = score_fn.score(x, y)
        if s > best + 1e-12:
            best = s
            argmax = {key: p}
        elif abs(s - best) <= 1e-12:
            argmax[key] = p
    return best, argmax


def oracle_residual_profile(
    p: TemporalPattern,
    graphs: Sequence[TemporalGraph],
    budget: OracleBudget = OracleBudget(),
) -> dict[str, tuple[int, ...]]:
    """Per-graph sorted multiset of residual sizes, one entry per match."""
    out: dict[str, tuple[int, ...]] = {}
    for g in graphs:
        sizes = []
        for emb in oracle_embeddings(p, g, budget):
            sizes.append(g.edges_after(emb.max_data_time))
        if sizes:
            out[g.id] = tuple(sorted(sizes))
    return out


def oracle_residual_equal(
    g1: TemporalPattern,
    g2: TemporalPattern,
    graphs: Sequence[TemporalGraph],
    budget: OracleBudget = OracleBudget(),
) -> bool:
    """Direct residual comparison: per-graph multisets of residual sizes must agree."""
    return oracle_residual_profile(g1, graphs, budget) == oracle_residual_profile(g2, graphs, budget)
