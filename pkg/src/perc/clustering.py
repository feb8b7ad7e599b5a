"""Clustering the uncertain graph: likelihood-ratio merging and brute force.

scc_cluster grows blocks agglomeratively: while some block pair's merge
probability (product of spanning YES odds against spanning NO odds) exceeds
one half, merge the best pair.  mlc_bruteforce checks tiny instances by
scoring every partition.  mlc_unchanged is the cheap screen that tells the
harness whether a freshly crowdsourced answer can move the maximum
likelihood clustering at all.
"""

from __future__ import annotations

import math

from .graph import (Clustering, Pair, UncertainGraph, clustering_log_likelihood,
                    enumerate_partitions)
from .util import canonical_pair

MAX_BRUTEFORCE_RECORDS = 10

# Two clusterings whose log10 likelihoods differ by less than this are
# treated as tied and settled by canonical order instead of float noise.
_TIE_EPS = 1e-9


def merge_probability(graph: UncertainGraph, block_a, block_b) -> float | None:
    """Probability that two blocks describe the same entity, given only the
    crowdsourced edges spanning them.

    Computed in log space as prod(p) / (prod(p) + prod(1 - p)) over the
    spanning edges, iterated in canonical order so the value does not
    depend on construction order.  Returns None when nothing spans the
    pair, which callers treat as "no evidence, skip".
    """
    a = tuple(sorted(set(block_a)))
    b = tuple(sorted(set(block_b)))
    if set(a) & set(b):
        raise ValueError(f"blocks {a} and {b} overlap")
    spanning = graph.edges_between(a, b)
    if not spanning:
        return None
    return _merge_prob_from_edges([p for _, p in spanning])


def _merge_prob_from_edges(probs: list[float]) -> float:
    log_yes = 0.0
    log_no = 0.0
    zero_yes = zero_no = 0
    for p in probs:
        if p == 0.0:
            zero_yes += 1
        else:
            log_yes += math.log10(p)
        if p == 1.0:
            zero_no += 1
        else:
            log_no += math.log10(1.0 - p)
    if zero_yes and zero_no:
        # certain evidence in both directions, neutral value that never merges
        return 0.5
    if zero_yes:
        return 0.0
    if zero_no:
        return 1.0
    # 1 / (1 + prod(1-p)/prod(p)), guarded against overflow in the exponent
    diff = log_no - log_yes
    if diff > 300:
        return 0.0
    if diff < -300:
        return 1.0
    return 1.0 / (1.0 + 10.0 ** diff)


class _PairAgg:
    """Running log-space tallies for the edges spanning one block pair."""

    __slots__ = ("log_yes", "log_no", "zero_yes", "zero_no")

    def __init__(self):
        self.log_yes = 0.0
        self.log_no = 0.0
        self.zero_yes = 0
        self.zero_no = 0

    def add_edge(self, p: float):
        if p == 0.0:
            self.zero_yes += 1
        else:
            self.log_yes += math.log10(p)
        if p == 1.0:
            self.zero_no += 1
        else:
            self.log_no += math.log10(1.0 - p)

    def absorb(self, other: "_PairAgg"):
        self.log_yes += other.log_yes
        self.log_no += other.log_no
        self.zero_yes += other.zero_yes
        self.zero_no += other.zero_no

    def probability(self) -> float:
        if self.zero_yes and self.zero_no:
            return 0.5
        if self.zero_yes:
            return 0.0
        if self.zero_no:
            return 1.0
        diff = self.log_no - self.log_yes
        if diff > 300:
            return 0.0
        if diff < -300:
            return 1.0
        return 1.0 / (1.0 + 10.0 ** diff)


def scc_cluster(graph: UncertainGraph) -> Clustering:
    """Agglomerative clustering by spanning-edge likelihood ratio.

    Starts from singletons and repeatedly merges the block pair with the
    highest merge probability while that maximum is strictly above 0.5.
    Pairs without any spanning edge are never candidates.  Ties go to the
    pair whose (min member, other block's min member) key is
    lexicographically smallest, which pins the merge order.
    """
    blocks: dict[int, tuple[str, ...]] = {i: (r,) for i, r in enumerate(graph.records)}
    owner = {r: i for i, r in enumerate(graph.records)}
    agg: dict[tuple[int, int], _PairAgg] = {}
    for (a, b), p in graph.edge_items():
        key = (owner[a], owner[b]) if owner[a] < owner[b] else (owner[b], owner[a])
        entry = agg.get(key)
        if entry is None:
            entry = agg[key] = _PairAgg()
        entry.add_edge(p)

    next_id = len(blocks)
    while agg:
        best_key = None
        best_prob = -1.0
        best_order = None
        for key, entry in agg.items():
            prob = entry.probability()
            ia, ib = key
            order = tuple(sorted((blocks[ia][0], blocks[ib][0])))
            if prob > best_prob or (prob == best_prob and order < best_order):
                best_key, best_prob, best_order = key, prob, order
        if best_prob <= 0.5:
            break
        ia, ib = best_key
        merged = tuple(sorted(blocks[ia] + blocks[ib]))
        mid = next_id
        next_id += 1
        del blocks[ia], blocks[ib]
        blocks[mid] = merged

        combined: dict[int, _PairAgg] = {}
        for (x, y), entry in list(agg.items()):
            if {x, y} == {ia, ib}:
                del agg[(x, y)]
                continue
            if x in (ia, ib) or y in (ia, ib):
                other = y if x in (ia, ib) else x
                del agg[(x, y)]
                bucket = combined.get(other)
                if bucket is None:
                    combined[other] = entry
                else:
                    bucket.absorb(entry)
        for other, entry in combined.items():
            key = (other, mid) if other < mid else (mid, other)
            agg[key] = entry

    return Clustering(blocks.values())


def mlc_bruteforce(graph: UncertainGraph) -> tuple[Clustering, float]:
    """Exact maximum likelihood clustering by scoring every partition.

    Only sensible for tiny instances, so record counts above
    MAX_BRUTEFORCE_RECORDS are rejected.  Likelihood ties are broken by
    canonical order: fewest blocks first, then lexicographic block lists.
    """
    if len(graph.records) > MAX_BRUTEFORCE_RECORDS:
        raise ValueError(
            f"refusing brute force over {len(graph.records)} records "
            f"(limit {MAX_BRUTEFORCE_RECORDS})")
    scored = [(clustering_log_likelihood(graph, c), c)
              for c in enumerate_partitions(graph.records)]
    best = max(ll for ll, _ in scored)
    tied = [c for ll, c in scored if ll >= best - _TIE_EPS]
    winner = min(tied, key=lambda c: (len(c.blocks), c.blocks))
    return winner, clustering_log_likelihood(graph, winner)


def mlc_unchanged(previous: Clustering, pair: Pair, p: float) -> bool:
    """True when a new answer for ``pair`` with YES fraction ``p`` agrees
    with the previous clustering strongly enough that the maximum
    likelihood clustering provably stays put.

    The condition is that the answer's probability under the clustering's
    labeling exceeds one half: p for an intra-block pair, 1 - p for a
    cross-block pair.  Exactly 0.5 fails the screen.
    """
    a, b = canonical_pair(*pair)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    if previous.same_block(a, b):
        return p > 0.5
    return (1.0 - p) > 0.5
