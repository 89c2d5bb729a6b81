"""Behavior query evaluation against a large test graph.

A mined pattern used as a query identifies instances: embeddings in the test
graph, each carrying the time interval its matched edges span.  An
identified instance is correct when its interval lies inside a ground-truth
interval of the behavior, and a ground-truth instance is discovered when at
least one correct identified instance falls inside it.  Precision is
correct/identified, recall is discovered/total; queries for the same
behavior are OR-combined, so adding queries can only grow the identified
pool.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .graphs import Embedding, TemporalGraph, TemporalPattern, verify_embedding
from .sequences import DEFAULT_OPTIONS, SubgraphTestOptions, find_embeddings


@dataclass(frozen=True)
class Instance:
    """One identified occurrence of a behavior query."""

    embedding: Embedding
    interval: tuple[int, int]

    @classmethod
    def from_embedding(cls, emb: Embedding) -> "Instance":
        return cls(emb, (min(emb.times), max(emb.times)))


@dataclass(frozen=True)
class GroundTruth:
    """True behavior executions: (behavior name, start, end) per instance."""

    entries: tuple[tuple[str, int, int], ...]

    def __post_init__(self):
        for name, start, end in self.entries:
            if start > end:
                raise ValueError(f"ground-truth interval for {name!r} has start > end")

    def by_behavior(self) -> dict[str, list[tuple[int, int]]]:
        out: dict[str, list[tuple[int, int]]] = {}
        for name, start, end in self.entries:
            out.setdefault(name, []).append((start, end))
        return out


def load_ground_truth(path: str | Path) -> GroundTruth:
    """Parse lines of the form ``behavior <name> <start> <end>``."""
    entries = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 4 or parts[0] != "behavior":
            raise ValueError(f"{path}:{lineno}: expected 'behavior <name> <start> <end>'")
        entries.append((parts[1], int(parts[2]), int(parts[3])))
    return GroundTruth(tuple(entries))


def save_ground_truth(truth: GroundTruth, path: str | Path) -> None:
    lines = [f"behavior {name} {start} {end}" for name, start, end in truth.entries]
    Path(path).write_text("\n".join(lines) + "\n")


def _shards(g: TemporalGraph, window: int) -> Iterable[TemporalGraph]:
    """Overlapping slices of length 2*window stepping by window.

    Any match whose interval is at most ``window`` long lies entirely inside
    at least one shard, so shard-level search plus deduplication finds the
    same instances as a whole-graph search restricted to that duration.
    """
    if window < 1:
        raise ValueError("shard window must be a positive number of ticks")
    if not g.edges:
        return
    t0 = g.edges[0].t
    t1 = g.edges[-1].t
    start = t0
    idx = 0
    while start <= t1:
        chunk = [e for e in g.edges if start <= e.t < start + 2 * window]
        if chunk:
            yield TemporalGraph(f"{g.id}#{idx}", g.labels, chunk)
        idx += 1
        start += window


def find_instances(
    p: TemporalPattern,
    g: TemporalGraph,
    limit: Optional[int] = None,
    window: Optional[int] = None,
    opts: SubgraphTestOptions = DEFAULT_OPTIONS,
) -> list[Instance]:
    """Distinct matches of one query in the test graph, as time-stamped instances.

    With ``window`` set, the graph is searched in overlapping time shards
    (bounding per-shard work); matches found in several shards collapse to
    one instance.  Results are ordered by interval, then node image.
    """
    seen: set[Embedding] = set()
    out: list[Instance] = []
    sources = _shards(g, window) if window else (g,)
    for shard in sources:
        room = None if limit is None else limit - len(out)
        if room is not None and room <= 0:
            break
        for emb in find_embeddings(p, shard, limit=room, opts=opts):
            if emb in seen:
                continue
            seen.add(emb)
            out.append(Instance.from_embedding(emb))
    out.sort(key=lambda inst: (inst.interval, inst.embedding.nodes))
    if limit is not None:
        out = out[:limit]
    return out


@dataclass(frozen=True)
class BehaviorAccuracy:
    behavior: str
    identified: int
    correct: int
    truth_instances: int
    discovered: int
    precision: float
    recall: float
    vacuous_precision: bool = False


@dataclass(frozen=True)
class EvalReport:
    per_behavior: tuple[BehaviorAccuracy, ...]
    precision: float
    recall: float


def evaluate(
    instances_by_behavior: dict[str, Sequence[Instance]],
    truth: GroundTruth,
) -> EvalReport:
    """Precision/recall per behavior plus macro-averages.

    An instance is correct iff its interval is fully contained in one of the
    behavior's true intervals.  A behavior with no identified instances gets
    precision 1.0 when it also has no true instances (vacuously clean) and
    0.0 otherwise; the vacuous case is flagged in the per-behavior row.
    """
    truth_map = truth.by_behavior()
    behaviors = sorted(set(truth_map) | set(instances_by_behavior))
    rows = []
    for name in behaviors:
        intervals = truth_map.get(name, [])
        instances = list(instances_by_behavior.get(name, []))
        correct = [
            inst
            for inst in instances
            if any(s <= inst.interval[0] and inst.interval[1] <= e for s, e in intervals)
        ]
        discovered = sum(
            1
            for s, e in intervals
            if any(s <= inst.interval[0] and inst.interval[1] <= e for inst in correct)
        )
        vacuous = not instances
        if instances:
            precision = len(correct) / len(instances)
        else:
            precision = 1.0 if not intervals else 0.0
        recall = discovered / len(intervals) if intervals else 1.0
        rows.append(
            BehaviorAccuracy(
                behavior=name,
                identified=len(instances),
                correct=len(correct),
                truth_instances=len(intervals),
                discovered=discovered,
                precision=precision,
                recall=recall,
                vacuous_precision=vacuous,
            )
        )
    if rows:
        macro_p = sum(r.precision for r in rows) / len(rows)
        macro_r = sum(r.recall for r in rows) / len(rows)
    else:
        macro_p = macro_r = 1.0
    return EvalReport(tuple(rows), macro_p, macro_r)


def verify_instances(p: TemporalPattern, g: TemporalGraph, instances: Iterable[Instance]) -> bool:
    """Re-check every instance independently against the pattern and graph."""
    return all(
        verify_embedding(p, g, inst.embedding)
        and inst.interval == (min(inst.embedding.times), max(inst.embedding.times))
        for inst in instances
    )
