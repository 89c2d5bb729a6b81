"""Tour of the core model: temporal graphs, patterns, and sequence encodings.

Run:  python demos/01_temporal_graphs_and_sequences.py
"""

from tpmine import (
    canonical_pattern,
    encode,
    is_t_connected,
    patterns_equal,
    temporal_subgraph_test,
    validate,
)

# A temporal graph is a labeled directed multigraph whose edges carry
# distinct integer timestamps.  Think of nodes as system entities (processes,
# files, sockets) and edges as timestamped interactions between them.
trace = validate(
    "trace",
    ["Proc", "File", "Sock", "Proc", "File"],
    [
        (0, 1, 10),   # Proc writes File
        (1, 3, 12),   # File read by another Proc
        (3, 2, 15),   # that Proc opens a Sock
        (3, 4, 21),   # and writes a second File
        (0, 2, 30),   # first Proc reaches the Sock much later
    ],
)
print(trace)
print("T-connected:", is_t_connected(trace))

# T-connectivity means every timestamp prefix is connected.  Interleaving two
# unrelated interactions breaks it:
split = validate("split", ["A", "B", "C", "D"], [(0, 1, 1), (2, 3, 2), (1, 2, 3)])
print("disconnected prefix ->", is_t_connected(split))

# Patterns are temporal graphs with timestamps compacted to 1..|E|.  Any edge
# list with distinct timestamps canonicalizes into one:
pattern = canonical_pattern(
    {7: "Proc", 9: "File", 4: "Proc"},
    [(7, 9, 100), (9, 4, 250)],
)
print("canonical pattern:", pattern.text())

# Pattern equality is a linear scan matching edges timestamp by timestamp;
# it returns the unique node correspondence when the two match.
other = canonical_pattern(["Proc", "File", "Proc"], [(0, 1, 1), (1, 2, 2)])
print("equal?", patterns_equal(pattern, other) is not None)

# Every temporal graph is faithfully described by three sequences: nodes in
# first-visit order, edges in time order, and the enhanced node sequence
# that subgraph testing scans.
nodeseq, edgeseq, enhseq = encode(trace)
print("node sequence:", [(n, lab) for n, lab in nodeseq.entries])
print("edge sequence:", edgeseq.entries)
print("enhanced:     ", [(n, lab) for n, lab in enhseq.entries])

# The subsequence-based subgraph test finds a witness embedding: a node map
# plus an order-preserving timestamp map.
witness = temporal_subgraph_test(pattern, trace)
print("pattern occurs in trace:", witness)
