"""Dataset file format, ingestion, synthetic corpora, and report serialization.

The on-disk dataset format is line oriented and diff friendly::

    g <id> <positive|negative|test>
    v <nodeIndex> <label>
    e <src> <dst> <timestamp>

Node indices are dense from 0 within each graph; labels are any
non-whitespace text.  Events that share a timestamp are either rejected
(default: the data model assumes a total order) or sequentialized
deterministically in file order.

The synthetic generator builds labeled activity corpora: every positive
graph embeds one instance of a planted behavior pattern (its edges
interleaved with background noise, order preserved), negatives carry
background only, and a test graph strings together shifted behavior episodes
separated by background traffic, with ground-truth intervals recorded for
each episode.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .graphs import DuplicateTimestamp, TemporalEdge, TemporalGraph, TemporalPattern, validate
from .matcher import GroundTruth
from .miner import MiningConfig, MiningResult
from .scoring import GTest, InfoGain, LogRatio, ScoreFunction, ScoredPattern


class ParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class TieRejected(DuplicateTimestamp):
    pass


class SpecInvalid(ValueError):
    pass


ROLES = ("positive", "negative", "test")


def sequentialize_ties(
    events: Sequence[tuple[int, int, int]], policy: str = "reject"
) -> list[tuple[int, int, int]]:
    """Resolve equal timestamps into a strict total order.

    ``reject`` raises TieRejected on the first duplicate.  ``inputOrder``
    stably sorts by timestamp (ties keep file order) and bumps timestamps
    minimally upward, so all non-tied order relations are preserved and the
    result is strictly increasing.
    """
    if policy not in ("reject", "inputOrder"):
        raise ValueError(f"unknown tie policy {policy!r}")
    ordered = sorted(events, key=lambda ev: ev[2])
    if policy == "reject":
        for a, b in zip(ordered, ordered[1:]):
            if a[2] == b[2]:
                raise TieRejected(f"events share timestamp {a[2]} under the reject policy")
        return ordered
    out: list[tuple[int, int, int]] = []
    prev = -1
    for src, dst, t in ordered:
        t = max(t, prev + 1)
        out.append((src, dst, t))
        prev = t
    return out


def parse_dataset(
    text: str,
    tie_policy: str = "reject",
    allow_self_loops: bool = False,
) -> list[tuple[str, TemporalGraph]]:
    """Parse a dataset document into (role, graph) pairs, in file order."""
    graphs: list[tuple[str, TemporalGraph]] = []
    seen_ids: set[str] = set()
    gid: Optional[str] = None
    role = ""
    labels: list[str] = []
    edges: list[tuple[int, int, int]] = []
    start_line = 0

    def flush(line: int):
        if gid is None:
            return
        try:
            ordered = sequentialize_ties(edges, tie_policy)
            graphs.append((role, validate(gid, labels, ordered, allow_self_loops)))
        except TieRejected:
            raise
        except ValueError as exc:
            raise ParseError(f"graph {gid!r} (started line {start_line}): {exc}", line) from exc

    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "g":
            flush(lineno - 1)
            if len(parts) != 3 or parts[2] not in ROLES:
                raise ParseError("expected 'g <id> <positive|negative|test>'", lineno)
            gid, role = parts[1], parts[2]
            if gid in seen_ids:
                raise ParseError(f"duplicate graph id {gid!r}", lineno)
            seen_ids.add(gid)
            labels, edges = [], []
            start_line = lineno
        elif tag == "v":
            if gid is None:
                raise ParseError("'v' line before any 'g' line", lineno)
            if len(parts) != 3:
                raise ParseError("expected 'v <nodeIndex> <label>'", lineno)
            try:
                idx = int(parts[1])
            except ValueError:
                raise ParseError(f"node index {parts[1]!r} is not an integer", lineno) from None
            if idx != len(labels):
                raise ParseError(f"node index {idx} is not dense (expected {len(labels)})", lineno)
            labels.append(parts[2])
        elif tag == "e":
            if gid is None:
                raise ParseError("'e' line before any 'g' line", lineno)
            if len(parts) != 4:
                raise ParseError("expected 'e <src> <dst> <t>'", lineno)
            try:
                src, dst, t = int(parts[1]), int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError("edge fields must be integers", lineno) from None
            if src >= len(labels) or dst >= len(labels) or src < 0 or dst < 0:
                raise ParseError(f"edge endpoint outside declared nodes 0..{len(labels) - 1}", lineno)
            edges.append((src, dst, t))
        else:
            raise ParseError(f"unknown record type {tag!r}", lineno)
    flush(lineno)
    return graphs


def load_dataset(
    path: str | Path,
    tie_policy: str = "reject",
    allow_self_loops: bool = False,
) -> tuple[list[TemporalGraph], list[TemporalGraph], list[TemporalGraph]]:
    """Load and split a dataset file into (positives, negatives, test graphs)."""
    graphs = parse_dataset(Path(path).read_text(), tie_policy, allow_self_loops)
    positives = [g for role, g in graphs if role == "positive"]
    negatives = [g for role, g in graphs if role == "negative"]
    tests = [g for role, g in graphs if role == "test"]
    return positives, negatives, tests


def dump_dataset(graphs: Iterable[tuple[str, TemporalGraph]]) -> str:
    lines = []
    for role, g in graphs:
        lines.append(f"g {g.id} {role}")
        for i, lab in enumerate(g.labels):
            lines.append(f"v {i} {lab}")
        for e in g.edges:
            lines.append(f"e {e.src} {e.dst} {e.t}")
    return "\n".join(lines) + "\n"


def save_dataset(path: str | Path, graphs: Iterable[tuple[str, TemporalGraph]]) -> None:
    Path(path).write_text(dump_dataset(graphs))


def replicate(graphs: Sequence[TemporalGraph], k: int) -> list[TemporalGraph]:
    """k copies of each graph with fresh ids; pattern frequencies are unchanged."""
    if k < 1:
        raise ValueError("replication factor must be at least 1")
    out = []
    for g in graphs:
        out.append(g)
        for i in range(1, k):
            out.append(TemporalGraph(f"{g.id}~{i}", g.labels, g.edges))
    return out


# ---------------------------------------------------------------------------
# Synthetic corpora
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SyntheticSpec:
    """Knobs for the synthetic corpus generator.

    Background graphs draw node labels from a skewed (Zipf-like) distribution
    over an alphabet of ``n_labels``.  On top of that, a pool of small
    recurring activity templates makes the background repetitive rather than
    uniformly random, the way monitored systems are: each template appears in
    a graph at most once (with probability ``template_presence``), on fresh
    nodes whose labels are exclusive to its position in that template.

    The planted behavior is a T-connected pattern of ``planted_edges`` edges;
    its first ``planted_shared_nodes`` nodes reuse mid-frequency background
    labels (so its shortest sub-patterns stay ambiguous), the rest use
    behavior-exclusive labels.
    """

    n_positive: int = 100
    n_negative: int = 100
    nodes: int = 65
    edges: int = 120
    n_labels: int = 95
    zipf_s: float = 1.2
    planted_edges: int = 6
    planted_labels: Optional[tuple[str, ...]] = None
    planted_shared_nodes: int = 2
    n_templates: int = 6
    template_edges_lo: int = 4
    template_edges_hi: int = 7
    template_presence: float = 1.0
    test_episodes: int = 40
    test_segment_edges: int = 50
    behavior: str = "planted"

    def validated(self) -> "SyntheticSpec":
        if self.n_positive < 0 or self.n_negative < 0:
            raise SpecInvalid("graph counts must be non-negative")
        if self.nodes < 2 or self.edges < 1:
            raise SpecInvalid("background graphs need at least 2 nodes and 1 edge")
        if self.n_labels < 4:
            raise SpecInvalid("label alphabet must have at least 4 labels")
        if self.planted_edges < 1:
            raise SpecInvalid("the planted pattern needs at least 1 edge")
        if self.planted_shared_nodes < 0:
            raise SpecInvalid("planted_shared_nodes must be non-negative")
        if not (1 <= self.template_edges_lo <= self.template_edges_hi):
            raise SpecInvalid("bad template size range")
        if not (0.0 <= self.template_presence <= 1.0):
            raise SpecInvalid("template_presence must lie in [0, 1]")
        if self.test_episodes < 0 or self.test_segment_edges < 0:
            raise SpecInvalid("test graph sizes must be non-negative")
        return self


PRESETS = {
    "small": dict(nodes=12, edges=18, n_labels=15, n_templates=3,
                  template_edges_lo=3, template_edges_hi=4,
                  test_episodes=25, test_segment_edges=12),
    "medium": dict(nodes=65, edges=30, n_labels=95, n_templates=24,
                   template_edges_lo=5, template_edges_hi=5,
                   test_episodes=40, test_segment_edges=50),
    "large": dict(nodes=280, edges=730, n_labels=270, n_templates=10,
                  test_episodes=60, test_segment_edges=200),
}


def preset_spec(name: str, **overrides) -> SyntheticSpec:
    if name not in PRESETS:
        raise SpecInvalid(f"unknown preset {name!r}; expected one of {sorted(PRESETS)}")
    params = dict(PRESETS[name])
    params.update(overrides)
    return SyntheticSpec(**params).validated()


@dataclass
class SyntheticDataset:
    positives: list[TemporalGraph]
    negatives: list[TemporalGraph]
    test_graph: TemporalGraph
    truth: GroundTruth
    planted: TemporalPattern
    positive_intervals: list[tuple[int, int]]
    spec: SyntheticSpec
    seed: int


def _zipf_weights(n: int, s: float) -> list[float]:
    return [1.0 / (r + 1) ** s for r in range(n)]


def _random_structure(rng: random.Random, n_edges: int) -> tuple[int, list[TemporalEdge]]:
    """Random T-connected shape; node count plus edges, labels assigned later."""
    n_nodes = 2
    edges = [TemporalEdge(0, 1, 1)]
    for t in range(2, n_edges + 1):
        kind = rng.choice(["forward", "backward", "inward"])
        if kind == "forward":
            src = rng.randrange(n_nodes)
            edges.append(TemporalEdge(src, n_nodes, t))
            n_nodes += 1
        elif kind == "backward":
            dst = rng.randrange(n_nodes)
            edges.append(TemporalEdge(n_nodes, dst, t))
            n_nodes += 1
        else:
            src = rng.randrange(n_nodes)
            dst = rng.randrange(n_nodes)
            while dst == src:
                dst = rng.randrange(n_nodes)
            edges.append(TemporalEdge(src, dst, t))
    return n_nodes, edges


def _assemble_graph(
    rng: random.Random,
    gid: str,
    spec: SyntheticSpec,
    alphabet: Sequence[str],
    weights: Sequence[float],
    instances: Sequence[TemporalPattern],
) -> tuple[TemporalGraph, list[tuple[int, int]]]:
    """Background edges plus embedded instances, merged into one time line.

    Every edge gets a random sort key; an instance's edges get sorted keys so
    their relative order survives the merge.  Timestamps then advance by
    random small steps, keeping the total order strict.
    """
    node_labels: list[str] = [
        rng.choices(alphabet, weights=weights, k=1)[0] for _ in range(spec.nodes)
    ]
    stream: list[tuple[float, int, int, int]] = []
    for _ in range(spec.edges):
        u = rng.randrange(spec.nodes)
        v = rng.randrange(spec.nodes)
        while v == u:
            v = rng.randrange(spec.nodes)
        stream.append((rng.random(), u, v, -1))
    for tag, inst in enumerate(instances):
        base = len(node_labels)
        node_labels.extend(inst.labels)
        keys = sorted(rng.random() for _ in inst.edges)
        for e, key in zip(inst.edges, keys):
            stream.append((key, base + e.src, base + e.dst, tag))
    stream.sort(key=lambda item: item[0])
    t = rng.randint(1, 5)
    edges = []
    spans: dict[int, list[int]] = {}
    for _, u, v, tag in stream:
        edges.append((u, v, t))
        if tag >= 0:
            spans.setdefault(tag, []).append(t)
        t += rng.randint(1, 3)
    graph = validate(gid, node_labels, edges)
    intervals = [(min(spans[tag]), max(spans[tag])) for tag in sorted(spans)]
    return graph, intervals


def _assemble_test_graph(
    rng: random.Random,
    spec: SyntheticSpec,
    alphabet: Sequence[str],
    weights: Sequence[float],
    planted: TemporalPattern,
    templates: Sequence[TemporalPattern],
) -> tuple[TemporalGraph, GroundTruth]:
    """Episodes of the planted behavior separated by background traffic."""
    pool_size = max(spec.nodes * 3, 8)
    node_labels: list[str] = [
        rng.choices(alphabet, weights=weights, k=1)[0] for _ in range(pool_size)
    ]
    edges: list[tuple[int, int, int]] = []
    truth_entries: list[tuple[str, int, int]] = []
    t = rng.randint(1, 5)

    def advance() -> int:
        nonlocal t
        now = t
        t += rng.randint(1, 3)
        return now

    def background_burst(count: int):
        for _ in range(count):
            u = rng.randrange(pool_size)
            v = rng.randrange(pool_size)
            while v == u:
                v = rng.randrange(pool_size)
            edges.append((u, v, advance()))

    def instance_burst(inst: TemporalPattern, mix: int) -> tuple[int, int]:
        base = len(node_labels)
        node_labels.extend(inst.labels)
        stream: list[tuple[float, int, int, bool]] = []
        keys = sorted(rng.random() for _ in inst.edges)
        for e, key in zip(inst.edges, keys):
            stream.append((key, base + e.src, base + e.dst, True))
        for _ in range(mix):
            u = rng.randrange(pool_size)
            v = rng.randrange(pool_size)
            while v == u:
                v = rng.randrange(pool_size)
            stream.append((rng.random(), u, v, False))
        stream.sort(key=lambda item: item[0])
        span = []
        for _, u, v, is_planted in stream:
            now = advance()
            edges.append((u, v, now))
            if is_planted:
                span.append(now)
        return (min(span), max(span))

    for _ in range(spec.test_episodes):
        background_burst(spec.test_segment_edges)
        if templates and rng.random() < 0.5:
            instance_burst(templates[rng.randrange(len(templates))], mix=2)
        start, end = instance_burst(planted, mix=spec.test_segment_edges // 8)
        truth_entries.append((spec.behavior, start, end))
    background_burst(spec.test_segment_edges)
    graph = validate("test-0", node_labels, edges)
    return graph, GroundTruth(tuple(truth_entries))


def generate_synthetic(spec: SyntheticSpec, seed: int = 0) -> SyntheticDataset:
    """Deterministic synthetic corpus with a planted behavior.

    Every positive graph contains exactly one instance of the planted
    pattern, so its frequency in the positives is 1 by construction;
    negatives share the same background process and never contain it as a
    whole (short sub-patterns may still occur by chance, which is the point).
    """
    spec = spec.validated()
    rng = random.Random(seed)
    alphabet = [f"L{i:03d}" for i in range(spec.n_labels)]
    weights = _zipf_weights(spec.n_labels, spec.zipf_s)

    n_nodes, planted_edges = _random_structure(rng, spec.planted_edges)
    if spec.planted_labels is not None:
        pool = list(spec.planted_labels)
        planted_node_labels = [pool[i % len(pool)] for i in range(n_nodes)]
    else:
        mid = spec.n_labels // 3
        planted_node_labels = []
        for i in range(n_nodes):
            if i < spec.planted_shared_nodes:
                planted_node_labels.append(alphabet[mid + i])
            else:
                planted_node_labels.append(f"P{i}")
    planted = TemporalPattern("planted", planted_node_labels, planted_edges)

    templates = []
    for ti in range(spec.n_templates):
        # Recurring background activities are pipelines with position-
        # exclusive labels: a setup chain whose last node then fans out to a
        # few artifacts.  One instance per graph, and later traffic never
        # reuses an earlier position's label.
        size = rng.randint(spec.template_edges_lo, spec.template_edges_hi)
        chain = 2 if size > 2 else size
        t_edges = [TemporalEdge(j, j + 1, j + 1) for j in range(chain)]
        for j in range(size - chain):
            t_edges.append(TemporalEdge(chain, chain + 1 + j, chain + 1 + j))
        t_labels = [f"T{ti:02d}{chr(97 + j)}" for j in range(size + 1)]
        templates.append(TemporalPattern(f"template-{ti}", t_labels, t_edges))

    def noise_templates() -> list[TemporalPattern]:
        # Each recurring background activity shows up at most once per graph.
        return [t for t in templates if rng.random() < spec.template_presence]

    positives = []
    positive_intervals = []
    for i in range(spec.n_positive):
        instances = noise_templates() + [planted]
        g, intervals = _assemble_graph(rng, f"pos-{i:04d}", spec, alphabet, weights, instances)
        positives.append(g)
        positive_intervals.append(intervals[-1])
    negatives = []
    for i in range(spec.n_negative):
        g, _ = _assemble_graph(rng, f"neg-{i:04d}", spec, alphabet, weights, noise_templates())
        negatives.append(g)
    test_graph, truth = _assemble_test_graph(rng, spec, alphabet, weights, planted, templates)
    return SyntheticDataset(
        positives=positives,
        negatives=negatives,
        test_graph=test_graph,
        truth=truth,
        planted=planted,
        positive_intervals=positive_intervals,
        spec=spec,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Report serialization
# ---------------------------------------------------------------------------


def _score_fn_to_dict(fn: ScoreFunction) -> dict:
    out = {"name": fn.name}
    if isinstance(fn, (LogRatio, GTest)):
        out["epsilon"] = fn.epsilon
    if isinstance(fn, GTest):
        out["scale"] = fn.scale
    if isinstance(fn, InfoGain):
        out["posPrior"] = fn.pos_prior
    return out


def config_to_dict(cfg: MiningConfig) -> dict:
    return {
        "maxEdges": cfg.max_edges,
        "topK": cfg.top_k,
        "score": _score_fn_to_dict(cfg.score_fn),
        "pruning": {
            "bound": cfg.use_bound_prune,
            "subgraph": cfg.use_subgraph_prune,
            "supergraph": cfg.use_supergraph_prune,
        },
        "embeddingCap": cfg.embedding_cap,
        "minFreqP": cfg.min_freq_p,
        "residualCheck": cfg.residual_check,
        "behavior": cfg.behavior,
        "seed": cfg.seed,
    }


def scored_pattern_to_dict(sp: ScoredPattern) -> dict:
    p = sp.pattern
    return {
        "edges": [
            {
                "src": e.src,
                "dst": e.dst,
                "t": e.t,
                "srcLabel": p.labels[e.src],
                "dstLabel": p.labels[e.dst],
            }
            for e in p.edges
        ],
        "score": sp.score,
        "freqP": sp.freq_p,
        "freqN": sp.freq_n,
        "interest": sp.interest,
    }


def pattern_from_dict(d: dict, graph_id: str = "query") -> TemporalPattern:
    labels: dict[int, str] = {}
    edges = []
    for e in d["edges"]:
        labels[e["src"]] = e["srcLabel"]
        labels[e["dst"]] = e["dstLabel"]
        edges.append(TemporalEdge(e["src"], e["dst"], e["t"]))
    return TemporalPattern(graph_id, [labels[i] for i in range(len(labels))], sorted(edges, key=lambda e: e.t))


def result_to_dict(result: MiningResult, include_timing: bool = True) -> dict:
    stats = {
        "patternsVisited": result.stats.patterns_visited,
        "boundPruneFires": result.stats.bound_prune_fires,
        "subgraphPruneFires": result.stats.subgraph_prune_fires,
        "supergraphPruneFires": result.stats.supergraph_prune_fires,
        "subisoTests": result.stats.subiso_tests,
        "residualTests": result.stats.residual_tests,
    }
    if include_timing:
        stats["wallTime"] = result.stats.wall_time
    return {
        "config": config_to_dict(result.config),
        "patterns": [scored_pattern_to_dict(sp) for sp in result.ranked],
        "maxScore": result.max_score,
        "maximizers": [scored_pattern_to_dict(sp) for sp in result.maximizers],
        "stats": stats,
    }


def save_report(result: MiningResult, path: str | Path) -> None:
    Path(path).write_text(json.dumps(result_to_dict(result), indent=2, sort_keys=True) + "\n")


def load_report(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())


def report_queries(report: dict) -> list[TemporalPattern]:
    return [
        pattern_from_dict(d, graph_id=f"query-{i}") for i, d in enumerate(report["patterns"])
    ]
