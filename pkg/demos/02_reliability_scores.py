"""
Reliability of a clustering
===========================

Likelihood only rewards a clustering for the exact edge outcome it
asserts.  Reliability is looser and more useful for steering questions:
each block should hang together (connectivity) and each block pair should
fall apart (disconnectivity), and we sum the log10 of those probabilities.
"""

import math

from perc import (
    Clustering,
    ReliabilityParams,
    UncertainGraph,
    connectivity_exact,
    connectivity_mc,
    disconnectivity,
    reliability,
)

# Four records; the candidate clustering is {A,B,C} + {D}.  Inside the big
# block two edges form a path, and two edges cross over to D.
graph = UncertainGraph.from_probabilities("ABCD", {
    ("A", "B"): 0.9, ("B", "C"): 0.8,
    ("A", "D"): 0.2, ("C", "D"): 0.6,
})
clustering = Clustering([("A", "B", "C"), ("D",)])

# The blocks separate when at least one crossing edge says NO:
# 1 - 0.2 * 0.6 = 0.88.
dis = disconnectivity(graph, clustering, ("A", "B", "C"), ("D",))
print(f"p(blocks separate)   = {dis:.4f}")

# The block {A,B,C} holds together only when both path edges are real:
# 0.9 * 0.8 = 0.72.
con = connectivity_exact(graph, ("A", "B", "C")).value
print(f"p(block connected)   = {con:.4f}")

# Reliability adds the two stories in log10; singleton blocks are
# connected for free.
score = reliability(graph, clustering)
print(f"reliability          = {score.value:.5f}")
print(f"check  log10(0.72) + log10(0.88) = {math.log10(0.72) + math.log10(0.88):.5f}")

# Exact connectivity enumerates edge outcomes with heavy pruning, which
# stops being fun past a couple dozen intra edges.  Blocks above the
# configured limit fall back to seeded sampling.
big = [f"r{i}" for i in range(12)]
edges = {}
for i in range(len(big)):
    for j in range(i + 1, min(i + 4, len(big))):
        edges[(big[i], big[j])] = 0.6 + 0.03 * ((i + j) % 5)
dense = UncertainGraph(big, edges=edges)
print(f"\nbigger block: {len(big)} records, {len(edges)} intra edges")

exact = connectivity_exact(dense, big, edge_limit=len(edges)).value
for seed in (0, 1, 2):
    mc = connectivity_mc(dense, big, ReliabilityParams(mc_samples=4000, seed=seed))
    print(f"  sampled (seed {seed})  {mc.value:.4f}   exact {exact:.4f}   "
          f"off by {abs(mc.value - exact):.4f}")

# Same seed, same estimate, every time; that determinism is what makes
# whole experiment runs reproducible later.
again = connectivity_mc(dense, big, ReliabilityParams(mc_samples=4000, seed=0))
print("  seed 0 again      ", f"{again.value:.4f}")
