"""Mine the most discriminative patterns out of a synthetic labeled corpus.

The generator plants one behavior instance in every positive graph, on top
of background noise and recurring activity templates that also appear in the
negatives.  Mining should recover sub-patterns of the planted behavior as
the top-scoring queries.

Run:  python demos/02_mining_a_planted_behavior.py
"""

import time

from tpmine import MiningConfig, generate_synthetic, mine, preset_spec

spec = preset_spec("small", n_positive=30, n_negative=30, test_episodes=0)
data = generate_synthetic(spec, seed=42)
print("planted behavior:", data.planted.text())
print(f"{len(data.positives)} positive / {len(data.negatives)} negative graphs, "
      f"~{sum(g.n_edges for g in data.positives) // len(data.positives)} edges each")

cfg = MiningConfig(max_edges=4, top_k=5)
started = time.monotonic()
result = mine(data.positives, data.negatives, cfg)
print(f"\nmined in {time.monotonic() - started:.2f}s, "
      f"visited {result.stats.patterns_visited} patterns, "
      f"max score {result.max_score:.4f}, {len(result.maximizers)} maximizers")

print("\ntop queries (score, positive freq, negative freq, interest):")
for sp in result.ranked:
    print(f"  {sp.score:8.4f}  {sp.freq_p:4.2f}  {sp.freq_n:4.2f}  {sp.interest:6.4f}  {sp.pattern.text()}")

# The same mine with the registry pruning rules disabled visits more
# patterns and reaches the identical answer -- pruning is pure speed.
plain = mine(data.positives, data.negatives,
             MiningConfig(max_edges=4, top_k=5, use_subgraph_prune=False,
                          use_supergraph_prune=False, use_bound_prune=False))
print(f"\nwithout pruning: visited {plain.stats.patterns_visited} "
      f"(vs {result.stats.patterns_visited}), same max score: "
      f"{abs(plain.max_score - result.max_score) < 1e-12}")
print(f"prune fires: bound={result.stats.bound_prune_fires} "
      f"subgraph={result.stats.subgraph_prune_fires} "
      f"supergraph={result.stats.supergraph_prune_fires}")
